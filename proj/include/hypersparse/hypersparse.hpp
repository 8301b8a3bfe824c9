#pragma once

#include "hypersparse/bundle.hpp"
#include "hypersparse/core.hpp"
#include "hypersparse/dynspanner.hpp"
#include "hypersparse/error.hpp"
#include "hypersparse/event_log.hpp"
#include "hypersparse/fulldyn.hpp"
#include "hypersparse/oracle.hpp"
#include "hypersparse/rng.hpp"
#include "hypersparse/sparsifier.hpp"
#include "hypersparse/stream.hpp"
