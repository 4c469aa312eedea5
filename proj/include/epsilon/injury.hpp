#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"

namespace eps {

// A branch label: the default "?" or a committed numeral.
struct Label {
  bool is_q = true;
  std::uint64_t n = 0;
  static Label q() { return {}; }
  static Label num(std::uint64_t v) { return {false, v}; }
  friend auto operator<=>(const Label&, const Label&) = default;
};

using Path = std::vector<Label>;

inline Path extend(Path p, Label l) {
  p.push_back(l);
  return p;
}

inline bool is_prefix(const Path& a, const Path& b) {
  if (a.size() > b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

inline bool strict_prefix(const Path& a, const Path& b) {
  return a.size() < b.size() && is_prefix(a, b);
}

inline std::string label_to_string(const Label& l) {
  return l.is_q ? "?" : std::to_string(l.n);
}

inline std::string path_to_string(const Path& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ",";
    out += label_to_string(p[i]);
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// Path codec: a bijection between paths and naturals that respects the
// search order. The empty path is 0; a child's code pairs its parent's code
// with the label (? first, then 0, 1, ...) and shifts by one, so the code of
// any proper extension exceeds its prefix's and the all-? path is the least
// node of its depth.
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > UINT64_MAX - b) throw std::overflow_error("path code");
  return a + b;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > UINT64_MAX / b) throw std::overflow_error("path code");
  return a * b;
}

inline std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = checked_add(a, b);
  std::uint64_t tri = (s % 2 == 0) ? checked_mul(s / 2, checked_add(s, 1))
                                   : checked_mul(checked_add(s, 1) / 2, s);
  return checked_add(tri, b);
}

// Largest w with w * (w + 1) / 2 <= z.
inline std::uint64_t triangular_root(std::uint64_t z) {
  std::uint64_t lo = 0, hi = 6074000999ULL;  // tri(hi) > UINT64_MAX / 2
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo + 1) / 2;
    std::uint64_t tri =
        (mid % 2 == 0) ? (mid / 2) * (mid + 1) : ((mid + 1) / 2) * mid;
    if (tri <= z)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace detail

inline std::uint64_t label_code(const Label& l) {
  if (l.is_q) return 0;
  return detail::checked_add(l.n, 1);
}

inline std::uint64_t omega_index(const Path& p) {
  std::uint64_t code = 0;
  for (const auto& l : p)
    code = detail::checked_add(detail::cantor_pair(code, label_code(l)), 1);
  return code;
}

inline Path index_to_path(std::uint64_t code) {
  std::vector<Label> rev;
  while (code != 0) {
    std::uint64_t z = code - 1;
    std::uint64_t w = detail::triangular_root(z);
    std::uint64_t tri = (w % 2 == 0) ? (w / 2) * (w + 1) : ((w + 1) / 2) * w;
    std::uint64_t b = z - tri;
    std::uint64_t a = w - b;
    rev.push_back(b == 0 ? Label::q() : Label::num(b - 1));
    code = a;
  }
  return Path(rev.rbegin(), rev.rend());
}

// ---------------------------------------------------------------------------
// The correction ordering on paths: a path gets smaller by growing or by
// replacing a "?" with a numeral at the first divergence point. Committed
// numerals never step back.
// ---------------------------------------------------------------------------

inline bool kb_leq(const Path& a, const Path& b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  if (k == a.size() && k == b.size()) return true;   // equal
  if (k == b.size()) return true;                    // a extends b
  if (k == a.size()) return false;                   // b extends a
  return b[k].is_q && !a[k].is_q;
}

inline bool kb_less(const Path& a, const Path& b) {
  return !(a == b) && kb_leq(a, b);
}

// ---------------------------------------------------------------------------
// Injury checks over recorded traces. A step maps a source node to its image
// in the next tree; sources within one trace grow along a single branch.
// ---------------------------------------------------------------------------

struct TraceStep {
  Path source;
  Path image;
};

using Trace = std::vector<TraceStep>;

struct InjuryReport {
  bool ok = true;
  std::size_t at_i = 0, at_j = 0;  // offending pair when !ok
  std::string reason;
  std::size_t corrections = 0;     // divergence-point repairs seen
};

namespace detail {

enum class ImageMove { Equal, Extension, Correction, Other };

inline ImageMove classify_images(const Path& x, const Path& y) {
  std::size_t k = 0;
  while (k < x.size() && k < y.size() && x[k] == y[k]) ++k;
  if (k == x.size() && k == y.size()) return ImageMove::Equal;
  if (k == x.size()) return ImageMove::Extension;
  if (k == y.size()) return ImageMove::Other;  // image shrank
  if (x[k].is_q && !y[k].is_q) return ImageMove::Correction;
  return ImageMove::Other;
}

}  // namespace detail

// Strict reading: whenever one source properly extends another, the later
// image must properly extend the earlier or correct it at a "?".
inline InjuryReport check_finite_injury(const Trace& t) {
  InjuryReport r;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (!strict_prefix(t[i].source, t[j].source)) continue;
      auto m = detail::classify_images(t[i].image, t[j].image);
      if (m == detail::ImageMove::Correction) {
        ++r.corrections;
        continue;
      }
      if (m != detail::ImageMove::Extension) {
        r.ok = false;
        r.at_i = i;
        r.at_j = j;
        r.reason = m == detail::ImageMove::Equal
                       ? "image repeated across growing sources"
                       : "image stepped back from a committed branch";
        return r;
      }
    }
  }
  return r;
}

// Weak reading: images may also stall, but an image may repeat across at
// most max_run source growths before it must move.
inline InjuryReport check_weakly_finite_injury(const Trace& t,
                                               std::uint64_t max_run) {
  InjuryReport r;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::uint64_t run = 0;
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (!strict_prefix(t[i].source, t[j].source)) continue;
      auto m = detail::classify_images(t[i].image, t[j].image);
      if (m == detail::ImageMove::Correction) {
        ++r.corrections;
        continue;
      }
      if (m == detail::ImageMove::Other) {
        r.ok = false;
        r.at_i = i;
        r.at_j = j;
        r.reason = "image stepped back from a committed branch";
        return r;
      }
      if (m == detail::ImageMove::Equal && ++run > max_run) {
        r.ok = false;
        r.at_i = i;
        r.at_j = j;
        r.reason = "image stalled past the allowed run";
        return r;
      }
    }
  }
  return r;
}

}  // namespace eps
