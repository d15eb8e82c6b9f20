#include "sacobra/types.hpp"

#include <sstream>

namespace sacobra {

namespace {

std::string describe_bounds(const std::string& problem, Index coordinate, double value, double lower,
                            double upper) {
  std::ostringstream os;
  os << problem << ": coordinate " << coordinate << " = " << value << " outside [" << lower << ", " << upper
     << "]";
  return os.str();
}

std::string describe_point(const Vector& x) {
  std::ostringstream os;
  os << "non-finite surrogate value at x = (";
  for (Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

BoundsViolation::BoundsViolation(const std::string& problem, Index coordinate, double value, double lower,
                                 double upper)
    : Error(describe_bounds(problem, coordinate, value, lower, upper)), coordinate_(coordinate) {}

DuplicateCenter::DuplicateCenter(Index first, Index second, double distance)
    : Error("duplicate RBF centers " + std::to_string(first) + " and " + std::to_string(second) +
            " (distance " + std::to_string(distance) + ")") {}

InsufficientDesign::InsufficientDesign(Index have, Index need)
    : Error("insufficient design: " + std::to_string(have) + " points, need at least " + std::to_string(need)) {}

NonFiniteSurrogate::NonFiniteSurrogate(const Vector& x) : Error(describe_point(x)), x_(x) {}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& s : s_) s = splitmix64(state);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Lemire's nearly-divisionless method with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t stable_hash(const std::string& text, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a ^ rotl(b, 32) ^ 0x6a09e667f3bcc909ULL;
  splitmix64(state);
  return splitmix64(state);
}

}  // namespace sacobra
