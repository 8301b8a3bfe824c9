#pragma once

// Update stream text format, one event per line:
//   + <weight> <v1> <v2> ... <vk>    insert
//   - <edge-id>                      delete
//   # ...                            comment
// Blank lines are ignored as well.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hypersparse/core.hpp"
#include "hypersparse/error.hpp"

namespace hypersparse {

struct StreamEvent {
  enum class Kind { insert, erase };
  Kind kind = Kind::insert;
  double weight = 0.0;
  std::vector<VertexId> vertices;
  EdgeId id = 0;
  std::size_t line = 0;
};

inline std::vector<StreamEvent> parse_stream(std::istream& in) {
  std::vector<StreamEvent> events;
  std::string text;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, text)) {
    ++line_no;
    std::istringstream line(text);
    std::string op;
    if (!(line >> op) || op.front() == '#') continue;
    StreamEvent ev;
    ev.line = line_no;
    if (op == "+") {
      ev.kind = StreamEvent::Kind::insert;
      if (!(line >> ev.weight)) fail("expected a weight after '+'");
      long long v;
      while (line >> v) {
        if (v < 0) fail("negative vertex id");
        ev.vertices.push_back(static_cast<VertexId>(v));
      }
      if (!line.eof()) fail("malformed vertex list");
      if (ev.vertices.size() < 2) fail("an insertion needs at least two vertices");
    } else if (op == "-") {
      ev.kind = StreamEvent::Kind::erase;
      long long id;
      if (!(line >> id) || id < 0) fail("expected an edge id after '-'");
      ev.id = static_cast<EdgeId>(id);
      std::string rest;
      if (line >> rest) fail("trailing tokens after edge id");
    } else {
      fail("unknown operation '" + op + "'");
    }
    events.push_back(std::move(ev));
  }
  return events;
}

inline void write_stream(std::ostream& out, const std::vector<StreamEvent>& events) {
  std::ostringstream weight;
  for (const auto& ev : events) {
    if (ev.kind == StreamEvent::Kind::insert) {
      weight.str("");
      weight.precision(17);
      weight << ev.weight;
      out << "+ " << weight.str();
      for (VertexId v : ev.vertices) out << ' ' << v;
      out << '\n';
    } else {
      out << "- " << ev.id << '\n';
    }
  }
}

}  // namespace hypersparse
