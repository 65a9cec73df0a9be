#include "vor/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>

namespace vor {

namespace {

std::atomic<std::uint64_t> g_concretize_bits{1ULL << 20};

std::uint64_t bit_length(const BigNat& x) {
  return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

BigNat pow_ui(const BigNat& base, unsigned long e) {
  BigNat out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

std::partial_ordering flip(std::partial_ordering o) {
  if (o == std::partial_ordering::less) return std::partial_ordering::greater;
  if (o == std::partial_ordering::greater) return std::partial_ordering::less;
  return o;
}

std::partial_ordering cmp_nat(const BigNat& a, const BigNat& b) {
  const int c = cmp(a, b);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

}  // namespace

std::uint64_t concretize_bits() { return g_concretize_bits.load(); }
void set_concretize_bits(std::uint64_t bits) { g_concretize_bits.store(bits); }

BigNat binomial(const BigNat& n, unsigned long k) {
  if (n < 0) throw std::domain_error("binomial of a negative number");
  BigNat out;
  mpz_bin_ui(out.get_mpz_t(), n.get_mpz_t(), k);
  return out;
}

BigNat multinomial(const std::vector<int>& parts) {
  BigNat out = 1;
  long total = 0;
  for (int p : parts) {
    if (p < 0) throw std::domain_error("negative multinomial part");
    total += p;
    out *= binomial(BigNat(total), static_cast<unsigned long>(p));
  }
  return out;
}

std::string to_decimal(const BigNat& x) { return x.get_str(10); }

BigNat parse_bignat(const std::string& decimal) {
  if (decimal.empty() || decimal.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("not a non-negative decimal integer: '" + decimal + "'");
  }
  return BigNat(decimal, 10);
}

// --- TowerExpr --------------------------------------------------------------

TowerExpr::TowerExpr(BigNat value) : rep_(std::move(value)) {
  if (std::get<BigNat>(rep_) < 0) throw std::domain_error("TowerExpr values are non-negative");
}

TowerExpr::TowerExpr(BigNat coeff, unsigned long base, TowerExpr exponent, BigNat offset) {
  if (base < 2) throw std::domain_error("power base must be at least 2");
  if (coeff == 0) {
    rep_ = std::move(offset);
    return;
  }
  const std::uint64_t limit = concretize_bits();
  if (exponent.is_concrete() && exponent.value() <= limit) {
    const unsigned long e = exponent.value().get_ui();
    // Cheap size estimate before materializing.
    const std::uint64_t approx = e * (bit_length(BigNat(base)) - 1) + bit_length(coeff);
    if (approx <= limit + 1) {
      BigNat v = coeff * pow_ui(BigNat(base), e) + offset;
      if (bit_length(v) <= limit) {
        rep_ = std::move(v);
        return;
      }
    }
  }
  rep_ = std::make_shared<const Sym>(
      Sym{std::move(coeff), base, std::make_shared<const TowerExpr>(std::move(exponent)),
          std::move(offset)});
}

TowerExpr TowerExpr::tower(unsigned height, const BigNat& top) {
  TowerExpr cur(top);
  for (unsigned i = 0; i < height; ++i) cur = power(2, cur);
  return cur;
}

TowerExpr TowerExpr::power(unsigned long base, const TowerExpr& exponent) {
  return TowerExpr(BigNat(1), base, exponent, BigNat(0));
}

TowerExpr TowerExpr::scaled_power(unsigned long base, const TowerExpr& m) {
  if (m.is_concrete()) return TowerExpr(m.value(), base, m, BigNat(0));
  const Sym& s = m.sym();
  if (s.offset != 0 || s.base != base || !s.exponent->is_concrete()) {
    throw std::domain_error("m * q^m is not representable for m = " + m.to_string());
  }
  // m q^m = c b^E b^m = c b^(m + E), and m + E = c b^E + E.
  const BigNat& e = s.exponent->value();
  TowerExpr shifted(s.coeff, base, *s.exponent, e);
  return TowerExpr(s.coeff, base, shifted, BigNat(0));
}

TowerExpr TowerExpr::plus(const BigNat& a) const {
  if (is_concrete()) return TowerExpr(value() + a);
  const Sym& s = sym();
  TowerExpr out = *this;
  out.rep_ = std::make_shared<const Sym>(Sym{s.coeff, s.base, s.exponent, s.offset + a});
  return out;
}

TowerExpr TowerExpr::times(const BigNat& c) const {
  if (is_concrete()) return TowerExpr(value() * c);
  if (c == 0) return TowerExpr(BigNat(0));
  const Sym& s = sym();
  TowerExpr out = *this;
  out.rep_ = std::make_shared<const Sym>(Sym{s.coeff * c, s.base, s.exponent, s.offset * c});
  return out;
}

const BigNat& TowerExpr::value() const {
  if (!is_concrete()) throw std::logic_error("value of symbolic TowerExpr " + to_string());
  return std::get<BigNat>(rep_);
}

unsigned TowerExpr::height() const {
  if (is_concrete()) return 0;
  return 1 + sym().exponent->height();
}

std::optional<BigNat> TowerExpr::pure_tower_top() const {
  if (is_concrete()) return value();
  const Sym& s = sym();
  if (s.coeff != 1 || s.base != 2 || s.offset != 0) return std::nullopt;
  return s.exponent->pure_tower_top();
}

std::partial_ordering TowerExpr::compare(const TowerExpr& other) const {
  if (is_concrete() && other.is_concrete()) return cmp_nat(value(), other.value());
  if (!is_concrete() && other.is_concrete()) return flip(other.compare(*this));

  if (is_concrete()) {
    // concrete vs symbolic
    const Sym& s = other.sym();
    const BigNat& c = value();
    const std::uint64_t bits = bit_length(c);
    if (s.exponent->is_concrete()) {
      const BigNat& e = s.exponent->value();
      const BigNat lower_bits = e * BigNat(bit_length(BigNat(s.base)) - 1) + bit_length(s.coeff);
      if (BigNat(bits) < lower_bits) return std::partial_ordering::less;
      // Sizes are comparable: materialize.
      BigNat v = s.coeff * pow_ui(BigNat(s.base), e.get_ui()) + s.offset;
      return cmp_nat(c, v);
    }
    // other >= 2^exponent > 2^bits > c whenever exponent > bits.
    if (TowerExpr(BigNat(bits)).compare(*s.exponent) == std::partial_ordering::less) {
      return std::partial_ordering::less;
    }
    return std::partial_ordering::unordered;
  }

  const Sym& a = sym();
  const Sym& b = other.sym();
  if (a.base != b.base) return std::partial_ordering::unordered;
  const auto exp_order = a.exponent->compare(*b.exponent);
  if (exp_order == std::partial_ordering::unordered) return exp_order;
  if (exp_order == std::partial_ordering::equivalent) {
    if (auto o = cmp_nat(a.coeff, b.coeff); o != std::partial_ordering::equivalent) return o;
    return cmp_nat(a.offset, b.offset);
  }
  if (exp_order == std::partial_ordering::greater) return flip(other.compare(*this));

  // a.exponent < b.exponent. Decide c_a b^Ea + o_a  vs  c_b b^Eb + o_b.
  std::optional<BigNat> gap;
  if (a.exponent->is_concrete() && b.exponent->is_concrete()) {
    gap = b.exponent->value() - a.exponent->value();
  } else if (!a.exponent->is_concrete() && !b.exponent->is_concrete()) {
    const Sym& ea = a.exponent->sym();
    const Sym& eb = b.exponent->sym();
    if (ea.coeff == eb.coeff && ea.base == eb.base &&
        ea.exponent->compare(*eb.exponent) == std::partial_ordering::equivalent) {
      gap = eb.offset - ea.offset;
    }
  }
  const BigNat coeff_bits(bit_length(a.coeff));
  if (!gap) {
    // b.exponent >= 2 a.exponent implies a gap of at least a.exponent.
    const auto doubled = b.exponent->compare(a.exponent->times(2));
    const auto small_coeff = TowerExpr(coeff_bits).compare(*a.exponent);
    if ((doubled == std::partial_ordering::greater || doubled == std::partial_ordering::equivalent) &&
        (small_coeff == std::partial_ordering::less || small_coeff == std::partial_ordering::equivalent)) {
      return std::partial_ordering::less;
    }
    return std::partial_ordering::unordered;
  }
  if (*gap >= coeff_bits) return std::partial_ordering::less;
  const BigNat scaled = b.coeff * pow_ui(BigNat(a.base), gap->get_ui());
  if (auto o = cmp_nat(a.coeff, scaled); o != std::partial_ordering::equivalent) return o;
  return cmp_nat(a.offset, b.offset);
}

std::string TowerExpr::to_string() const {
  if (is_concrete()) {
    std::string s = to_decimal(value());
    if (s.size() <= 60) return s;
    return "<" + std::to_string(s.size()) + "-digit integer>";
  }
  if (auto top = pure_tower_top()) {
    return "T_" + std::to_string(height()) + "(" + TowerExpr(*top).to_string() + ")";
  }
  const Sym& s = sym();
  std::string out;
  if (s.coeff != 1) out += to_decimal(s.coeff) + "*";
  out += std::to_string(s.base) + "^(" + s.exponent->to_string() + ")";
  if (s.offset != 0) out += "+" + to_decimal(s.offset);
  return out;
}

nlohmann::ordered_json TowerExpr::to_json() const {
  nlohmann::ordered_json j;
  j["tower_height"] = height();
  if (auto top = pure_tower_top()) {
    j["top"] = to_decimal(*top);
    return j;
  }
  const Sym& s = sym();
  j["base"] = s.base;
  j["coeff"] = to_decimal(s.coeff);
  j["exponent"] = s.exponent->to_json();
  j["offset"] = to_decimal(s.offset);
  return j;
}

TowerExpr TowerExpr::from_json(const nlohmann::ordered_json& j) {
  if (j.contains("exponent")) {
    return TowerExpr(parse_bignat(j.at("coeff").get<std::string>()),
                     j.at("base").get<unsigned long>(), from_json(j.at("exponent")),
                     parse_bignat(j.at("offset").get<std::string>()));
  }
  return tower(j.at("tower_height").get<unsigned>(), parse_bignat(j.at("top").get<std::string>()));
}

// --- formulas ----------------------------------------------------------------

TowerExpr stepping_down_bound(int k, const BigNat& r_lower) {
  if (k < 2) throw std::domain_error("stepping down needs k >= 2");
  if (r_lower < k - 1) throw std::domain_error("r_{k-1} must be at least k-1");
  return TowerExpr::power(2, TowerExpr(binomial(r_lower, static_cast<unsigned long>(k - 1))));
}

BigNat cfs_vertex_online_bound(int s, int t) {
  if (s < 3 || t < 3) throw std::domain_error("cfs bound needs s, t >= 3");
  return BigNat(s + t - 4) * binomial(BigNat(s + t - 2), static_cast<unsigned long>(s - 1));
}

TowerExpr cfs_r3_bound(int s, int t) {
  if (s < 4 || t < 4) throw std::domain_error("cfs r_3 bound needs s, t >= 4");
  return TowerExpr::power(2, TowerExpr(cfs_vertex_online_bound(s - 1, t - 1))).plus(1);
}

BigNat tree_vertex_budget(const std::vector<int>& targets) {
  std::vector<int> parts;
  for (int t : targets) {
    if (t < 2) throw std::domain_error("2-uniform targets must be at least 2");
    parts.push_back(t - 1);
  }
  return multinomial(parts);
}

BigNat tree_edge_budget(const std::vector<int>& targets) {
  long depth = 0;
  for (int t : targets) depth += t - 2;
  BigNat e = BigNat(depth) * tree_vertex_budget(targets);
  return e < 1 ? BigNat(1) : e;
}

TowerExpr theorem_vertex_bound(unsigned long q, const TowerExpr& m, int k) {
  if (m < TowerExpr(1)) throw std::domain_error("m must be at least 1");
  return TowerExpr::power(q, m).plus(k - 2);
}

TowerExpr theorem_edge_bound(unsigned long q, const TowerExpr& m) {
  if (m < TowerExpr(1)) throw std::domain_error("m must be at least 1");
  return TowerExpr::scaled_power(q, m);
}

TowerExpr iterated_chain_bound(int k, const std::vector<int>& targets) {
  if (k < 3) throw std::domain_error("chain bound needs k >= 3");
  for (int t : targets) {
    if (t < k + 1) throw std::domain_error("chain bound needs every target >= k+1");
  }
  const auto q = static_cast<unsigned long>(targets.size());
  std::vector<int> base = targets;
  for (int& t : base) t -= k - 2;
  TowerExpr b = tree_edge_budget(base);
  for (int j = 2; j < k - 1; ++j) b = TowerExpr::scaled_power(q, b);
  return TowerExpr::power(q, b).plus(k - 2);
}

BigNat trivial_online_upper(const BigNat& r, int k) {
  if (r < k) throw std::domain_error("trivial bound needs r >= k");
  return binomial(r, static_cast<unsigned long>(k));
}

// --- intervals ---------------------------------------------------------------

Interval log_bracket(unsigned long q, const BigNat& m, unsigned bits) {
  if (q < 2) throw std::domain_error("log base must be at least 2");
  if (m < 1) throw std::domain_error("log of a non-positive number");
  const BigNat scale = BigNat(1) << bits;
  BigNat x;
  mpz_pow_ui(x.get_mpz_t(), m.get_mpz_t(), 1UL << bits);
  // a = floor(log_q x)
  unsigned long a = mpz_sizeinbase(x.get_mpz_t(), static_cast<int>(q <= 62 ? q : 2));
  if (q > 62) a = a / (mpz_sizeinbase(BigNat(q).get_mpz_t(), 2) - 1) + 1;
  BigNat qa = pow_ui(BigNat(q), a);
  while (qa > x) {
    --a;
    qa /= q;
  }
  while (qa * q <= x) {
    ++a;
    qa *= q;
  }
  Interval out;
  out.lo = Rational(BigNat(a), scale);
  out.hi = qa == x ? out.lo : Rational(BigNat(a + 1), scale);
  out.lo.canonicalize();
  out.hi.canonicalize();
  return out;
}

Interval mu_bracket(const Rational& delta, unsigned long q, const BigNat& m, unsigned bits) {
  Interval lg = log_bracket(q, m, bits);
  Interval out;
  out.lo = delta * (1 + lg.lo / Rational(m));
  out.hi = delta * (1 + lg.hi / Rational(m));
  return out;
}

BigNat floor_rational_power(const BigNat& x, const BigNat& num, unsigned long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (!num.fits_ulong_p()) throw std::domain_error("exponent numerator too large");
  BigNat p = pow_ui(x, num.get_ui());
  BigNat r;
  mpz_root(r.get_mpz_t(), p.get_mpz_t(), den);
  return r;
}

// --- dichotomy -------------------------------------------------------------

namespace {

constexpr unsigned kLogBits = 20;
constexpr unsigned long kMaxDenominator = 1UL << 14;

BigNat floor_q(const Rational& r) {
  BigNat out;
  mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

BigNat ceil_q(const Rational& r) {
  BigNat out;
  mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

// Largest exactly computable lower estimate floor(x^(e_lo)) with e_lo <= e,
// refined until it reaches `want` or the denominator cap.
std::optional<BigNat> power_reaching(const BigNat& x, const Rational& e, const BigNat& want) {
  BigNat best = 0;
  for (unsigned long den = 16; den <= kMaxDenominator; den *= 4) {
    const BigNat num = floor_q(e * Rational(BigNat(den)));
    best = floor_rational_power(x, num, den);
    if (best >= want) return best;
  }
  return std::nullopt;
}

// true if lo > x^e is certified.
bool exceeds_power(const BigNat& lo, const BigNat& x, const Rational& e) {
  for (unsigned long den = 16; den <= kMaxDenominator; den *= 4) {
    const BigNat num = ceil_q(e * Rational(BigNat(den)));
    if (!num.fits_ulong_p()) return false;
    // lo^den > x^num  <=>  lo > x^(num/den) >= x^e
    if (pow_ui(lo, den) > pow_ui(x, num.get_ui())) return true;
  }
  return false;
}

std::string rational_str(const Rational& r) { return r.get_str(); }

}  // namespace

nlohmann::ordered_json DichotomyCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  if (branch) {
    j["branch"] = *branch == Branch::kRamseyBound ? "ramsey_bound" : "stepped_up";
  } else {
    j["branch"] = nullptr;
  }
  j["explanation"] = explanation;
  j["mu"] = {{"lo", rational_str(mu.lo)}, {"hi", rational_str(mu.hi)},
             {"lo_decimal", mu.lo.get_d()}, {"hi_decimal", mu.hi.get_d()}};
  auto arr = nlohmann::ordered_json::array();
  for (const auto& ineq : inequalities) {
    arr.push_back({{"statement", ineq.statement}, {"lhs", ineq.lhs.to_json()},
                   {"rhs", ineq.rhs.to_json()}});
  }
  j["inequalities"] = arr;
  return j;
}

DichotomyCertificate dichotomy_certificate(const DichotomyInput& in) {
  DichotomyCertificate cert;
  if (in.delta <= 0 || in.delta > 1) throw std::domain_error("delta must lie in (0, 1]");
  if (in.targets.empty()) throw std::domain_error("targets required");
  const auto q = static_cast<unsigned long>(in.targets.size());
  const int k = in.k;

  if (!in.online_lower_uniformity.is_exact()) {
    cert.explanation = "withheld: r~_{k-1}(t-1) must be exact to evaluate mu";
    return cert;
  }
  const BigNat m = *in.online_lower_uniformity.lower;
  if (m < 1) throw std::domain_error("r~_{k-1} must be positive");
  cert.mu = mu_bracket(in.delta, q, m, kLogBits);
  const Rational mu_k_lo = cert.mu.lo * k;
  const Rational mu_k_hi = cert.mu.hi * k;

  // Upper bound on r~_k: supplied, else the stepping-down online bound m q^m.
  const TowerExpr online_upper =
      in.online.upper ? TowerExpr(*in.online.upper) : theorem_edge_bound(q, TowerExpr(m));
  BigNat ramsey_lower = *std::max_element(in.targets.begin(), in.targets.end());
  if (in.ramsey.lower && *in.ramsey.lower > ramsey_lower) ramsey_lower = *in.ramsey.lower;

  // Case r~_k <= r_k^(mu k).
  if (online_upper.is_concrete()) {
    if (auto reach = power_reaching(ramsey_lower, mu_k_lo, online_upper.value())) {
      cert.branch = DichotomyCertificate::Branch::kSteppedUp;
      cert.explanation = "r~_k <= r_k^(mu k) certified from r~_k <= " +
                         online_upper.to_string() + " and r_k >= " + to_decimal(ramsey_lower);
      cert.inequalities.push_back({"r~_k <= floor(r_k^(mu k))", online_upper, TowerExpr(*reach)});
      cert.inequalities.push_back(
          {"r_{k+1}(t+1) <= q^(r~_k) + k - 1 <= q^(floor(r_k^(mu k))) + k - 1",
           TowerExpr::power(q, online_upper).plus(k - 1),
           TowerExpr::power(q, TowerExpr(*reach)).plus(k - 1)});
      return cert;
    }
  }

  // q^(m / (delta k)) = q^(m * den / (num * k))
  const Rational exponent = Rational(m) / (in.delta * k);
  const BigNat ramsey_cap = floor_rational_power(BigNat(q), exponent.get_num(),
                                                 exponent.get_den().get_ui());
  auto ramsey_bound_branch = [&](std::string why) {
    cert.branch = DichotomyCertificate::Branch::kRamseyBound;
    cert.explanation = std::move(why);
    cert.inequalities.push_back(
        {"r_k <= floor(q^(m~ / (delta k)))", TowerExpr(*in.ramsey.upper), TowerExpr(ramsey_cap)});
    if (in.ramsey_lower_uniformity.lower) {
      cert.inequalities.push_back(
          {"m~ <= C(r_{k-1}, k-1)", TowerExpr(m),
           TowerExpr(binomial(*in.ramsey_lower_uniformity.lower,
                              static_cast<unsigned long>(k - 1)))});
    } else {
      cert.explanation += "; m~ <= C(r_{k-1}, k-1) not evaluated (r_{k-1} unknown)";
    }
  };

  // Case r~_k > r_k^(mu k).
  if (in.online.lower && in.ramsey.upper &&
      exceeds_power(*in.online.lower, *in.ramsey.upper, mu_k_hi) &&
      *in.ramsey.upper <= ramsey_cap) {
    ramsey_bound_branch("r~_k > r_k^(mu k) certified from r~_k >= " +
                        to_decimal(*in.online.lower) + " and r_k <= " +
                        to_decimal(*in.ramsey.upper));
    return cert;
  }
  if (in.ramsey.upper && *in.ramsey.upper <= ramsey_cap) {
    ramsey_bound_branch("r_k <= q^(m~/(delta k)) verified directly from r_k <= " +
                        to_decimal(*in.ramsey.upper));
    return cert;
  }

  cert.explanation =
      "withheld: supplied values decide neither case (need r_k >= r~_k^(1/(mu k)) with r~_k <= " +
      online_upper.to_string() + ", or r_k <= " + to_decimal(ramsey_cap) + ")";
  return cert;
}

}  // namespace vor
