#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "injury.hpp"
#include "parse.hpp"

namespace eps {

// Machine-readable outputs are line oriented and start with this header.
inline constexpr const char* kMachineHeader = "epsengine/1";

// ---------------------------------------------------------------------------
// Trace files
//
//   epsengine/1
//   trace select
//   level 1
//   step 0 () -> ()
//   step 1 (0) -> (2)
// ---------------------------------------------------------------------------

inline void write_trace(std::ostream& os, const std::string& kind,
                        std::uint32_t level, const Trace& t) {
  os << kMachineHeader << "\n";
  os << "trace " << kind << "\n";
  os << "level " << level << "\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << "step " << k << " " << path_to_string(t[k].source) << " -> "
       << path_to_string(t[k].image) << "\n";
  }
}

struct TraceFile {
  std::string kind;
  std::uint32_t level = 1;
  Trace trace;
};

inline TraceFile read_trace(std::istream& is) {
  TraceFile out;
  std::string line;
  int lineno = 0;
  auto want = [&](const char* what) {
    if (!std::getline(is, line))
      throw ParseError(std::string("missing ") + what, lineno + 1, 1);
    ++lineno;
  };
  want("header");
  if (line != kMachineHeader) throw ParseError("bad header", lineno, 1);
  want("trace line");
  {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag >> out.kind;
    if (tag != "trace" || out.kind.empty())
      throw ParseError("expected 'trace <kind>'", lineno, 1);
  }
  want("level line");
  {
    std::istringstream ls(line);
    std::string tag;
    long long lvl = -1;
    ls >> tag >> lvl;
    if (tag != "level" || lvl < 1)
      throw ParseError("expected 'level <n>'", lineno, 1);
    out.level = static_cast<std::uint32_t>(lvl);
  }
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, src, arrow, img;
    long long k = -1;
    ls >> tag >> k >> src >> arrow >> img;
    if (tag != "step" || arrow != "->" ||
        k != static_cast<long long>(out.trace.size()))
      throw ParseError("expected 'step <k> <src> -> <img>'", lineno, 1);
    out.trace.push_back(
        {parse_path(src, lineno, 1), parse_path(img, lineno, 1)});
  }
  return out;
}

}  // namespace eps
