#pragma once

// Protocol data model shared by every engine: parities, pair targets, protocol
// steps, scenario parsing/rendering, exact dyadic probabilities, and outcome
// distributions with their comparison metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace majbox {

// ---------------------------------------------------------------------------
// parity algebra

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

constexpr Parity operator^(Parity a, Parity b) {
  return static_cast<Parity>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
constexpr Parity& operator^=(Parity& a, Parity b) { return a = a ^ b; }

constexpr bool is_odd(Parity p) { return p == Parity::Odd; }
constexpr Parity parity_from_bit(unsigned bit) {
  return (bit & 1u) ? Parity::Odd : Parity::Even;
}
constexpr int parity_bit(Parity p) { return p == Parity::Odd ? 1 : 0; }

inline const char* to_string(Parity p) { return p == Parity::Odd ? "odd" : "even"; }

inline std::optional<Parity> parity_from_string(const std::string& s) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// protocol steps

class scenario_error : public std::runtime_error {
 public:
  explicit scenario_error(std::string msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : std::move(msg)),
        line_(line) {}
  // 1-based source line when the failure came from a scenario file; 0 otherwise.
  int line() const { return line_; }

 private:
  int line_;
};

// Thrown when a safety bound trips (branch explosion, non-terminating
// rewrite); maps to its own process exit code in the CLI.
class guard_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unordered two-box target; stored with a < b.
struct PairSpec {
  int a;
  int b;

  PairSpec(int x, int y) : a(std::min(x, y)), b(std::max(x, y)) {
    if (x == y) throw scenario_error("pair must name two distinct boxes");
    if (a < 1) throw scenario_error("box index must be positive");
  }

  bool contains(int box) const { return box == a || box == b; }
  // The other endpoint; box must be a member.
  int partner_of(int box) const { return box == a ? b : a; }

  friend bool operator==(const PairSpec&, const PairSpec&) = default;
  friend auto operator<=>(const PairSpec& l, const PairSpec& r) {
    return std::pair{l.a, l.b} <=> std::pair{r.a, r.b};
  }
};

enum class BraidDir : std::uint8_t { CCW = 0, CW = 1 };

inline const char* to_string(BraidDir d) { return d == BraidDir::CCW ? "ccw" : "cw"; }

struct InitStep {
  std::vector<std::pair<PairSpec, Parity>> pairs;
  friend bool operator==(const InitStep&, const InitStep&) = default;
};
struct BraidStep {
  int a;
  int b;
  BraidDir dir;
  friend bool operator==(const BraidStep&, const BraidStep&) = default;
};
struct MeasureStep {
  PairSpec pair;
  friend bool operator==(const MeasureStep&, const MeasureStep&) = default;
};
struct JointStep {
  PairSpec pairA;
  PairSpec pairB;
  friend bool operator==(const JointStep&, const JointStep&) = default;
};

using Step = std::variant<InitStep, BraidStep, MeasureStep, JointStep>;

struct Scenario {
  int boxCount = 0;  // even, = 2n
  std::string name;
  std::vector<Step> steps;

  // One trace slot per MeasureStep or JointStep.
  int measurement_count() const {
    int k = 0;
    for (const auto& s : steps)
      if (std::holds_alternative<MeasureStep>(s) || std::holds_alternative<JointStep>(s)) ++k;
    return k;
  }
};

// Every box 1..boxCount in exactly one pair; throws scenario_error otherwise.
inline void validate_perfect_matching(const std::vector<std::pair<PairSpec, Parity>>& pairs,
                                      int boxCount) {
  std::vector<int> seen(static_cast<std::size_t>(boxCount) + 1, 0);
  for (const auto& [pr, par] : pairs) {
    (void)par;
    if (pr.b > boxCount)
      throw scenario_error("box index " + std::to_string(pr.b) + " out of range 1.." +
                           std::to_string(boxCount));
    ++seen[static_cast<std::size_t>(pr.a)];
    ++seen[static_cast<std::size_t>(pr.b)];
  }
  for (int x = 1; x <= boxCount; ++x)
    if (seen[static_cast<std::size_t>(x)] != 1)
      throw scenario_error("init must pair every box exactly once (box " + std::to_string(x) +
                           ")");
}

// Throws scenario_error on any structural violation.
inline void validate_scenario(const Scenario& sc) {
  if (sc.boxCount < 2 || sc.boxCount % 2 != 0)
    throw scenario_error("box count must be a positive even number");
  if (sc.steps.empty() || !std::holds_alternative<InitStep>(sc.steps.front()))
    throw scenario_error("first step must be init");
  auto check_box = [&](int x) {
    if (x < 1 || x > sc.boxCount)
      throw scenario_error("box index " + std::to_string(x) + " out of range 1.." +
                           std::to_string(sc.boxCount));
  };
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const Step& st = sc.steps[i];
    if (std::holds_alternative<InitStep>(st)) {
      if (i != 0) throw scenario_error("init is only allowed as the first step");
      const auto& init = std::get<InitStep>(st);
      std::vector<int> seen(static_cast<std::size_t>(sc.boxCount) + 1, 0);
      for (const auto& [pr, par] : init.pairs) {
        (void)par;
        check_box(pr.a);
        check_box(pr.b);
        ++seen[static_cast<std::size_t>(pr.a)];
        ++seen[static_cast<std::size_t>(pr.b)];
      }
      for (int x = 1; x <= sc.boxCount; ++x)
        if (seen[static_cast<std::size_t>(x)] != 1)
          throw scenario_error("init must pair every box exactly once (box " +
                               std::to_string(x) + ")");
    } else if (std::holds_alternative<BraidStep>(st)) {
      const auto& b = std::get<BraidStep>(st);
      check_box(b.a);
      check_box(b.b);
      if (std::abs(b.a - b.b) != 1)
        throw scenario_error("braid requires adjacent positions, got " + std::to_string(b.a) +
                             " and " + std::to_string(b.b));
    } else if (std::holds_alternative<MeasureStep>(st)) {
      const auto& m = std::get<MeasureStep>(st);
      check_box(m.pair.a);
      check_box(m.pair.b);
    } else {
      const auto& j = std::get<JointStep>(st);
      check_box(j.pairA.a);
      check_box(j.pairA.b);
      check_box(j.pairB.a);
      check_box(j.pairB.b);
      if (j.pairA.contains(j.pairB.a) || j.pairA.contains(j.pairB.b))
        throw scenario_error("joint measurement needs four distinct boxes");
    }
  }
}

// ---------------------------------------------------------------------------
// scenario file grammar (line oriented, '#' starts a comment):
//   boxes <2n>
//   init (<a>,<b>)=<even|odd> ...
//   braid <a> <b> <ccw|cw>
//   measure <a> <b>
//   joint (<a>,<b>) (<c>,<d>)

namespace detail {

inline int parse_int_token(const std::string& tok, int line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    throw scenario_error("expected an integer, got '" + tok + "'", line);
  }
  if (used != tok.size())
    throw scenario_error("expected an integer, got '" + tok + "'", line);
  return v;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text, std::string name = "") {
  static const std::regex init_pair_re(R"(^\((\d+),(\d+)\)=(even|odd)$)");
  static const std::regex plain_pair_re(R"(^\((\d+),(\d+)\)$)");

  Scenario sc;
  sc.name = std::move(name);
  bool saw_boxes = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto toks = detail::split_ws(raw);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "boxes") {
      if (saw_boxes) throw scenario_error("duplicate boxes line", lineno);
      if (toks.size() != 2) throw scenario_error("usage: boxes <2n>", lineno);
      sc.boxCount = detail::parse_int_token(toks[1], lineno);
      saw_boxes = true;
    } else if (kw == "init") {
      if (!saw_boxes) throw scenario_error("boxes must precede init", lineno);
      InitStep init;
      if (toks.size() < 2) throw scenario_error("init needs at least one pair", lineno);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        std::smatch m;
        if (!std::regex_match(toks[i], m, init_pair_re))
          throw scenario_error("bad init pair '" + toks[i] + "', expected (<a>,<b>)=<even|odd>",
                               lineno);
        int a = detail::parse_int_token(m[1].str(), lineno);
        int b = detail::parse_int_token(m[2].str(), lineno);
        if (a == b) throw scenario_error("pair must name two distinct boxes", lineno);
        init.pairs.emplace_back(PairSpec(a, b), *parity_from_string(m[3].str()));
      }
      sc.steps.push_back(std::move(init));
    } else if (kw == "braid") {
      if (toks.size() != 4) throw scenario_error("usage: braid <a> <b> <ccw|cw>", lineno);
      int a = detail::parse_int_token(toks[1], lineno);
      int b = detail::parse_int_token(toks[2], lineno);
      BraidDir dir;
      if (toks[3] == "ccw")
        dir = BraidDir::CCW;
      else if (toks[3] == "cw")
        dir = BraidDir::CW;
      else
        throw scenario_error("braid direction must be ccw or cw, got '" + toks[3] + "'", lineno);
      sc.steps.push_back(BraidStep{a, b, dir});
    } else if (kw == "measure") {
      if (toks.size() != 3) throw scenario_error("usage: measure <a> <b>", lineno);
      int a = detail::parse_int_token(toks[1], lineno);
      int b = detail::parse_int_token(toks[2], lineno);
      if (a == b) throw scenario_error("pair must name two distinct boxes", lineno);
      sc.steps.push_back(MeasureStep{PairSpec(a, b)});
    } else if (kw == "joint") {
      if (toks.size() != 3)
        throw scenario_error("usage: joint (<a>,<b>) (<c>,<d>)", lineno);
      PairSpec pairs[2] = {PairSpec(1, 2), PairSpec(1, 2)};
      for (int k = 0; k < 2; ++k) {
        std::smatch m;
        if (!std::regex_match(toks[static_cast<std::size_t>(k) + 1], m, plain_pair_re))
          throw scenario_error("bad pair '" + toks[static_cast<std::size_t>(k) + 1] +
                                   "', expected (<a>,<b>)",
                               lineno);
        int a = detail::parse_int_token(m[1].str(), lineno);
        int b = detail::parse_int_token(m[2].str(), lineno);
        if (a == b) throw scenario_error("pair must name two distinct boxes", lineno);
        pairs[k] = PairSpec(a, b);
      }
      sc.steps.push_back(JointStep{pairs[0], pairs[1]});
    } else {
      throw scenario_error("unknown directive '" + kw + "'", lineno);
    }
  }
  if (!saw_boxes) throw scenario_error("missing boxes line");
  try {
    validate_scenario(sc);
  } catch (const scenario_error& e) {
    if (e.line() > 0) throw;
    throw scenario_error(e.what());
  }
  return sc;
}

inline std::string render_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << "boxes " << sc.boxCount << "\n";
  for (const auto& st : sc.steps) {
    if (std::holds_alternative<InitStep>(st)) {
      out << "init";
      for (const auto& [pr, par] : std::get<InitStep>(st).pairs)
        out << " (" << pr.a << "," << pr.b << ")=" << to_string(par);
      out << "\n";
    } else if (std::holds_alternative<BraidStep>(st)) {
      const auto& b = std::get<BraidStep>(st);
      out << "braid " << b.a << " " << b.b << " " << to_string(b.dir) << "\n";
    } else if (std::holds_alternative<MeasureStep>(st)) {
      const auto& m = std::get<MeasureStep>(st);
      out << "measure " << m.pair.a << " " << m.pair.b << "\n";
    } else {
      const auto& j = std::get<JointStep>(st);
      out << "joint (" << j.pairA.a << "," << j.pairA.b << ") (" << j.pairB.a << ","
          << j.pairB.b << ")\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// exact dyadic rationals: value = num / 2^exp with num odd or zero, exp >= 0.
// Closed under the fair-coin branching the classical engines perform.

struct Dyadic {
  std::uint64_t num = 0;
  int exp = 0;

  static Dyadic make(std::uint64_t n, int e) {
    if (n == 0) return Dyadic{};
    while (e > 0 && (n & 1u) == 0) {
      n >>= 1;
      --e;
    }
    if (e < 0) {
      // Shift negative exponents back into the numerator (integer values).
      if (e < -63) throw std::overflow_error("dyadic exponent underflow");
      n <<= -e;
      e = 0;
    }
    if (e > 62) throw std::overflow_error("dyadic exponent overflow");
    return Dyadic{n, e};
  }
  static Dyadic zero() { return Dyadic{}; }
  static Dyadic one() { return Dyadic{1, 0}; }
  static Dyadic half() { return Dyadic{1, 1}; }

  bool is_zero() const { return num == 0; }
  double to_double() const { return std::ldexp(static_cast<double>(num), -exp); }

  friend Dyadic operator+(Dyadic l, Dyadic r) {
    int e = std::max(l.exp, r.exp);
    unsigned __int128 s = (static_cast<unsigned __int128>(l.num) << (e - l.exp)) +
                          (static_cast<unsigned __int128>(r.num) << (e - r.exp));
    if (s > ~std::uint64_t{0}) throw std::overflow_error("dyadic numerator overflow");
    return make(static_cast<std::uint64_t>(s), e);
  }
  friend Dyadic operator*(Dyadic l, Dyadic r) {
    unsigned __int128 p = static_cast<unsigned __int128>(l.num) * r.num;
    if (p > ~std::uint64_t{0}) throw std::overflow_error("dyadic numerator overflow");
    return make(static_cast<std::uint64_t>(p), l.exp + r.exp);
  }
  Dyadic halved() const { return make(num, exp + 1); }

  // Exact quotient when it is again dyadic (requires odd(d.num) | num).
  std::optional<Dyadic> try_div(Dyadic d) const {
    if (d.is_zero()) throw std::domain_error("dyadic division by zero");
    if (is_zero()) return zero();
    if (num % d.num != 0) return std::nullopt;
    return make(num / d.num, exp - d.exp);
  }

  friend bool operator==(const Dyadic&, const Dyadic&) = default;
  friend bool operator<(Dyadic l, Dyadic r) {
    int e = std::max(l.exp, r.exp);
    return (static_cast<unsigned __int128>(l.num) << (e - l.exp)) <
           (static_cast<unsigned __int128>(r.num) << (e - r.exp));
  }
};

// ---------------------------------------------------------------------------
// probabilities: exact dyadic while every contributor is exact, double otherwise

enum class Arithmetic : std::uint8_t { ExactDyadic, Float };

struct Prob {
  bool exact = true;
  Dyadic dy;       // meaningful when exact
  double fl = 0.;  // meaningful when !exact

  static Prob dyadic(Dyadic d) { return Prob{true, d, 0.}; }
  static Prob real(double v) { return Prob{false, Dyadic{}, v}; }
  static Prob zero() { return dyadic(Dyadic::zero()); }
  static Prob one() { return dyadic(Dyadic::one()); }
  static Prob half() { return dyadic(Dyadic::half()); }

  double value() const { return exact ? dy.to_double() : fl; }
  bool is_zero() const { return exact ? dy.is_zero() : fl == 0.; }

  friend Prob operator+(const Prob& l, const Prob& r) {
    if (l.exact && r.exact) return dyadic(l.dy + r.dy);
    return real(l.value() + r.value());
  }
  friend Prob operator*(const Prob& l, const Prob& r) {
    if (l.exact && r.exact) return dyadic(l.dy * r.dy);
    return real(l.value() * r.value());
  }
};

// ---------------------------------------------------------------------------
// outcome traces and distributions

using OutcomeTrace = std::vector<Parity>;  // lexicographic order, even < odd

inline std::string trace_to_string(const OutcomeTrace& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += to_string(t[i]);
  }
  return s + "]";
}

struct Distribution {
  std::map<OutcomeTrace, Prob> entries;

  void add(const OutcomeTrace& t, const Prob& p) {
    if (p.is_zero()) return;
    auto it = entries.find(t);
    if (it == entries.end())
      entries.emplace(t, p);
    else
      it->second = it->second + p;
  }

  Arithmetic arithmetic() const {
    for (const auto& [t, p] : entries)
      if (!p.exact) return Arithmetic::Float;
    return Arithmetic::ExactDyadic;
  }

  double total() const {
    double s = 0.;
    for (const auto& [t, p] : entries) s += p.value();
    return s;
  }

  // Sum = 1 exactly for dyadic entries, within tol for float ones.
  bool normalized(double tol = 1e-9) const {
    if (entries.empty()) return false;
    if (arithmetic() == Arithmetic::ExactDyadic) {
      Dyadic s = Dyadic::zero();
      for (const auto& [t, p] : entries) s = s + p.dy;
      return s == Dyadic::one();
    }
    return std::abs(total() - 1.) <= tol;
  }
};

namespace detail {
inline void check_same_trace_length(const Distribution& p, const Distribution& q) {
  if (p.entries.empty() || q.entries.empty()) return;
  if (p.entries.begin()->first.size() != q.entries.begin()->first.size())
    throw std::invalid_argument("distributions are over different trace lengths");
}
}  // namespace detail

// (1/2) sum |p - q| over the union of supports.
inline double tv_distance(const Distribution& p, const Distribution& q) {
  detail::check_same_trace_length(p, q);
  double acc = 0.;
  auto it = p.entries.begin();
  auto jt = q.entries.begin();
  while (it != p.entries.end() || jt != q.entries.end()) {
    if (jt == q.entries.end() || (it != p.entries.end() && it->first < jt->first)) {
      acc += it->second.value();
      ++it;
    } else if (it == p.entries.end() || jt->first < it->first) {
      acc += jt->second.value();
      ++jt;
    } else {
      acc += std::abs(it->second.value() - jt->second.value());
      ++it;
      ++jt;
    }
  }
  return acc / 2.;
}

// Supports must coincide and every probability agree within tol; tol = 0 with
// two exact inputs compares dyadics exactly.
inline bool distributions_equal(const Distribution& p, const Distribution& q, double tol) {
  detail::check_same_trace_length(p, q);
  if (p.entries.size() != q.entries.size()) return false;
  auto jt = q.entries.begin();
  for (auto it = p.entries.begin(); it != p.entries.end(); ++it, ++jt) {
    if (it->first != jt->first) return false;
    const Prob& a = it->second;
    const Prob& b = jt->second;
    if (tol == 0. && a.exact && b.exact) {
      if (!(a.dy == b.dy)) return false;
    } else if (std::abs(a.value() - b.value()) > tol) {
      return false;
    }
  }
  return true;
}

// Bayes restriction to traces extending prefix; returned traces drop the
// prefix. Stays exact whenever every conditional quotient is again dyadic.
inline Distribution condition_on_prefix(const Distribution& d, const OutcomeTrace& prefix) {
  Distribution sub;
  for (const auto& [t, p] : d.entries) {
    if (t.size() < prefix.size()) throw std::invalid_argument("prefix longer than traces");
    if (!std::equal(prefix.begin(), prefix.end(), t.begin())) continue;
    sub.add(OutcomeTrace(t.begin() + static_cast<std::ptrdiff_t>(prefix.size()), t.end()), p);
  }
  if (sub.entries.empty())
    throw std::domain_error("conditioning on a zero-probability prefix");
  bool exact = true;
  Dyadic mass_dy = Dyadic::zero();
  double mass = 0.;
  for (const auto& [t, p] : sub.entries) {
    exact = exact && p.exact;
    if (p.exact) mass_dy = mass_dy + p.dy;
    mass += p.value();
  }
  Distribution out;
  for (const auto& [t, p] : sub.entries) {
    if (exact) {
      if (auto q = p.dy.try_div(mass_dy)) {
        out.entries.emplace(t, Prob::dyadic(*q));
        continue;
      }
    }
    out.entries.emplace(t, Prob::real(p.value() / mass));
  }
  return out;
}

// Branch of a measurement: outcome recorded, probability, successor state.
template <class State>
struct Branch {
  Parity outcome;
  Prob prob;
  State state;
};

}  // namespace majbox
