#pragma once

// Exact evaluation of the recursive Ramsey bounds. Values that fit under a
// configurable bit threshold are kept as plain integers; larger ones stay
// symbolic as nested powers c * b^E + a, where E is itself a TowerExpr.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace vor {

using BigNat = mpz_class;
using Rational = mpq_class;

/// Concretization threshold in bits (default 2^20). Process-wide.
std::uint64_t concretize_bits();
void set_concretize_bits(std::uint64_t bits);

BigNat binomial(const BigNat& n, unsigned long k);
BigNat multinomial(const std::vector<int>& parts);
std::string to_decimal(const BigNat& x);
BigNat parse_bignat(const std::string& decimal);

class TowerExpr {
 public:
  TowerExpr() : TowerExpr(BigNat(0)) {}
  TowerExpr(BigNat value);  // NOLINT(google-explicit-constructor)
  TowerExpr(long value) : TowerExpr(BigNat(value)) {}  // NOLINT

  /// T_height(top): height nested powers of two over top.
  static TowerExpr tower(unsigned height, const BigNat& top);
  /// base^exponent for base >= 2.
  static TowerExpr power(unsigned long base, const TowerExpr& exponent);
  /// m * base^m. Throws std::domain_error when m is symbolic in a form this
  /// representation cannot absorb (exponent of exponent carrying an offset).
  static TowerExpr scaled_power(unsigned long base, const TowerExpr& m);

  TowerExpr plus(const BigNat& a) const;
  TowerExpr times(const BigNat& c) const;

  bool is_concrete() const { return std::holds_alternative<BigNat>(rep_); }
  /// Throws std::logic_error if symbolic.
  const BigNat& value() const;

  /// Number of nested exponentials above the innermost concrete exponent
  /// (0 for concrete values).
  unsigned height() const;
  /// If this equals T_h(x) for h = height(), returns x.
  std::optional<BigNat> pure_tower_top() const;

  /// Exact for every pair of concrete values and for symbolic values whose
  /// difference is structurally decidable; unordered otherwise.
  std::partial_ordering compare(const TowerExpr& other) const;
  friend bool operator==(const TowerExpr& a, const TowerExpr& b) {
    return a.compare(b) == std::partial_ordering::equivalent;
  }
  friend bool operator<=(const TowerExpr& a, const TowerExpr& b) {
    auto c = a.compare(b);
    return c == std::partial_ordering::less || c == std::partial_ordering::equivalent;
  }
  friend bool operator<(const TowerExpr& a, const TowerExpr& b) {
    return a.compare(b) == std::partial_ordering::less;
  }

  std::string to_string() const;
  nlohmann::ordered_json to_json() const;
  static TowerExpr from_json(const nlohmann::ordered_json& j);

 private:
  struct Sym {
    BigNat coeff;         // >= 1
    unsigned long base;   // >= 2
    std::shared_ptr<const TowerExpr> exponent;
    BigNat offset;        // small relative to base^exponent
  };
  TowerExpr(BigNat coeff, unsigned long base, TowerExpr exponent, BigNat offset);
  const Sym& sym() const { return *std::get<std::shared_ptr<const Sym>>(rep_); }

  std::variant<BigNat, std::shared_ptr<const Sym>> rep_;
};

// --- bound formulas --------------------------------------------------------

/// 2^binomial(r, k-1): the classical stepping-down bound on r_k given r_{k-1}.
TowerExpr stepping_down_bound(int k, const BigNat& r_lower);

/// (s+t-4) * C(s+t-2, s-1).
BigNat cfs_vertex_online_bound(int s, int t);

/// 2^((s+t-6) * C(s+t-4, s-2)) + 1.
TowerExpr cfs_r3_bound(int s, int t);

/// Vertex / edge guarantees of the color-tree strategy for 2-uniform targets:
/// multinomial(sum(t_c - 1); t_1 - 1, ...) vertices and sum(t_c - 2) times
/// that many edges (at least one edge).
BigNat tree_vertex_budget(const std::vector<int>& targets);
BigNat tree_edge_budget(const std::vector<int>& targets);

/// q^m + k - 2.
TowerExpr theorem_vertex_bound(unsigned long q, const TowerExpr& m, int k);
/// m * q^m.
TowerExpr theorem_edge_bound(unsigned long q, const TowerExpr& m);

/// Chains the online recurrence from the 2-uniform base: B_2 is the tree
/// edge budget at targets reduced k-2 times, B_{j+1} = B_j q^{B_j}, and the
/// result is q^{B_{k-1}} + k - 2. For q > 2 this extrapolates the two-color
/// statement.
TowerExpr iterated_chain_bound(int k, const std::vector<int>& targets);

/// binomial(r, k).
BigNat trivial_online_upper(const BigNat& r, int k);

// --- exact interval arithmetic --------------------------------------------

struct Interval {
  Rational lo;
  Rational hi;
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  Rational width() const { return hi - lo; }
};

/// Rational bracket of log_q(m) with denominator 2^bits, from the exact power
/// m^(2^bits); cost grows with 2^bits, so keep bits around 20.
Interval log_bracket(unsigned long q, const BigNat& m, unsigned bits);

/// mu = delta * (1 + log_q(m) / m), bracketed via log_bracket.
Interval mu_bracket(const Rational& delta, unsigned long q, const BigNat& m, unsigned bits);

/// floor(x^(num/den)) for x >= 0, den >= 1.
BigNat floor_rational_power(const BigNat& x, const BigNat& num, unsigned long den);

// --- dichotomy certificate -------------------------------------------------

/// A supplied quantity: exact when lower == upper, inconclusive when neither
/// side is known.
struct Supplied {
  std::optional<BigNat> lower;
  std::optional<BigNat> upper;

  static Supplied exact(BigNat v) { return {v, v}; }
  static Supplied bounded(std::optional<BigNat> lo, std::optional<BigNat> hi) {
    return {std::move(lo), std::move(hi)};
  }
  static Supplied unknown() { return {}; }
  bool is_exact() const { return lower && upper && *lower == *upper; }
};

struct DichotomyInput {
  Rational delta{1};
  int k = 3;
  std::vector<int> targets;
  Supplied ramsey_lower_uniformity;   // r_{k-1}(t - 1)
  Supplied ramsey;                    // r_k(t)
  Supplied online_lower_uniformity;   // r~_{k-1}(t - 1), i.e. m~
  Supplied online;                    // r~_k(t)
};

struct DichotomyCertificate {
  enum class Branch {
    // r_k <= q^(m/(delta k)) and m <= C(r_{k-1}, k-1)
    kRamseyBound,
    // r_{k+1}(t + 1) <= q^(r~_k) + k - 1 <= q^(r_k^(mu k)) + k - 1
    kSteppedUp,
  };

  std::optional<Branch> branch;  // empty: withheld
  std::string explanation;
  Interval mu;
  /// Verified inequalities, each lhs <= rhs with both sides exact.
  struct Inequality {
    std::string statement;
    TowerExpr lhs;
    TowerExpr rhs;
  };
  std::vector<Inequality> inequalities;

  nlohmann::ordered_json to_json() const;
};

DichotomyCertificate dichotomy_certificate(const DichotomyInput& input);

}  // namespace vor
