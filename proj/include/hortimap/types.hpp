#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <vector>

namespace hortimap {

using Scalar = double;

using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
using JointVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Rigid transforms are named by what they map: a variable `a_T_b` takes
// coordinates expressed in frame b to frame a.
using Isometry = Eigen::Transform<Scalar, 3, Eigen::Isometry>;

// Row-major so image(row, col) walks memory like a scanline.
template <typename T>
using ImageOf = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Image = ImageOf<Scalar>;
using LabelImage = ImageOf<std::int32_t>;

using PointCloud = std::vector<Vec3>;

inline constexpr int kNumClasses = 3;

enum class SemanticClass : std::int32_t {
  kFruit = 0,
  kLeaf = 1,
  kBackground = 2,
};

using ClassVec = Eigen::Matrix<Scalar, kNumClasses, 1>;

inline const char* class_name(SemanticClass c) {
  switch (c) {
    case SemanticClass::kFruit: return "fruit";
    case SemanticClass::kLeaf: return "leaf";
    case SemanticClass::kBackground: return "background";
  }
  return "invalid";
}

// Base colors for the three classes, used by the ground-truth renderer.
inline Vec3 class_color(SemanticClass c) {
  switch (c) {
    case SemanticClass::kFruit: return {0.85, 0.12, 0.10};
    case SemanticClass::kLeaf: return {0.10, 0.55, 0.12};
    case SemanticClass::kBackground: return {0.35, 0.38, 0.42};
  }
  return {0, 0, 0};
}

struct ColorImage {
  std::array<Image, 3> ch;

  void resize(int h, int w) {
    for (auto& c : ch) c = Image::Zero(h, w);
  }
  Vec3 at(int r, int c) const { return {ch[0](r, c), ch[1](r, c), ch[2](r, c)}; }
  void set(int r, int c, const Vec3& v) {
    ch[0](r, c) = v.x();
    ch[1](r, c) = v.y();
    ch[2](r, c) = v.z();
  }
};

struct SemanticImage {
  std::array<Image, kNumClasses> ch;

  void resize(int h, int w) {
    for (auto& c : ch) c = Image::Zero(h, w);
  }
  ClassVec at(int r, int c) const {
    ClassVec v;
    for (int k = 0; k < kNumClasses; ++k) v[k] = ch[k](r, c);
    return v;
  }
  void set(int r, int c, const ClassVec& v) {
    for (int k = 0; k < kNumClasses; ++k) ch[k](r, c) = v[k];
  }
};

}  // namespace hortimap
