#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hexcell {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double Norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double Distance(Vec2 a, Vec2 b) { return Norm(a - b); }

// Invalid or inconsistent configuration; reported before any work runs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A violated internal invariant (a bug or corrupted state, never user input).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hexcell
