#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgfv {

using Index = std::ptrdiff_t;
inline constexpr Index kNoIndex = -1;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// k x v for the upward unit vector k.
inline Vec2 rotate_left(Vec2 v) { return {-v.y, v.x}; }

/// A discrete scalar field tagged by where it lives on the mesh.
template <class Location>
struct Field {
  std::vector<double> values;

  Field() = default;
  explicit Field(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit Field(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }

  Field& operator+=(const Field& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& v : values) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend bool operator==(const Field&, const Field&) = default;
};

struct AtCells {};
struct AtVertices {};
struct AtEdges {};

/// Values at primal cell centers (q, psi, zeta, b).
using CellField = Field<AtCells>;
/// Values at dual cell centers (primal vertices), e.g. the remapped stream function.
using VertexField = Field<AtVertices>;
/// Normal components on edge pairs, or edge scalars such as the edge PV.
using EdgeField = Field<AtEdges>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshFormatError : public std::runtime_error {
 public:
  MeshFormatError(std::string section, std::size_t line, const std::string& what)
      : std::runtime_error("qgmesh: section '" + section + "', line " + std::to_string(line) +
                           ": " + what),
        section_(std::move(section)),
        line_(line) {}
  const std::string& section() const { return section_; }
  std::size_t line() const { return line_; }

 private:
  std::string section_;
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qgfv
