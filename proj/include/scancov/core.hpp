#pragma once

/**
 * \file
 * \brief Shared primitives for the scancov toolkit: vector aliases, 5-DoF
 * poses, angle helpers, a deterministic RNG, and numeric formatting.
 *
 * Everything in the library is value-semantic and immutable after
 * construction unless stated otherwise; snapshots can be shared freely
 * across threads.
 */

#include <Eigen/Core>
#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace scancov {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

/// Shortest-arc signed difference a - b, wrapped to (-pi, pi].
inline double ang_diff(double a, double b) { return wrap_pi(a - b); }

/// 5-DoF sensor configuration: drone position plus gimbal pitch/yaw.
struct Pose5 {
  Vec3 p{0, 0, 0};
  double pitch = 0.0;
  double yaw = 0.0;

  /// Optical-axis direction for this pose (yaw about z, then pitch).
  Vec3 forward() const {
    const double cp = std::cos(pitch);
    return Vec3(cp * std::cos(yaw), cp * std::sin(yaw), std::sin(pitch));
  }
  /// Horizontal right vector of the gimbal frame (independent of pitch).
  Vec3 right() const { return Vec3(std::sin(yaw), -std::cos(yaw), 0.0); }
  Vec3 up() const { return right().cross(forward()); }
};

/// Gimbal pitch limits: +45 deg up to -100 deg down.
inline constexpr double kPitchMaxRad = 45.0 * kPi / 180.0;
inline constexpr double kPitchMinRad = -100.0 * kPi / 180.0;

inline double clamp_pitch(double pitch) {
  return std::min(kPitchMaxRad, std::max(kPitchMinRad, pitch));
}

/**
 * \brief Deterministic 64-bit RNG (splitmix64 core).
 *
 * std::mt19937 + distributions are not bit-stable across standard library
 * implementations; this generator is, which the reproducibility contract
 * of the simulator depends on.
 */
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed + 0x9E3779B97f4A7C15ULL) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97f4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return double(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  uint32_t uniform_index(uint32_t n) {
    return n == 0 ? 0u : uint32_t(next_u64() % n);
  }

  /// Standard normal via Box-Muller (deterministic, no cached spare).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double t = uniform(0.0, 2.0 * kPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(r * std::cos(t), r * std::sin(t), z);
  }

 private:
  uint64_t state_;
};

/// Stable hash for deterministic per-entity jitter (FNV-1a over the words).
inline uint64_t mix_hash(uint64_t a, uint64_t b, uint64_t c = 0) {
  uint64_t h = 1469598103934665603ULL;
  for (uint64_t w : {a, b, c}) {
    for (int i = 0; i < 8; ++i) {
      h ^= (w >> (8 * i)) & 0xFF;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

/// Locale-independent numeric formatting used by every CSV/JSONL writer:
/// '.' decimal separator, 6 significant digits.
inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace scancov
