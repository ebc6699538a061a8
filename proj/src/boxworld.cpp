#include "entmix/boxworld.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace entmix::boxworld {

namespace {

void check_shape(int n_x, int n_y, int d_a, int d_b, std::size_t size) {
  if (n_x < 1 || n_y < 1) throw StructuralError("box settings must be positive");
  if (d_a < 1 || d_b < 1) throw StructuralError("box outcomes must be positive");
  const std::size_t expected = static_cast<std::size_t>(n_x) * n_y * d_a * d_b;
  if (size != expected)
    throw StructuralError("box table has " + std::to_string(size) + " entries, expected " + std::to_string(expected));
}

Rational marginal_a(const BoxState& box, int a, int x, int y) {
  Rational s = 0;
  for (int b = 0; b < box.outcomes_b(); ++b) s += box(a, b, x, y);
  return s;
}

Rational marginal_b(const BoxState& box, int b, int x, int y) {
  Rational s = 0;
  for (int a = 0; a < box.outcomes_a(); ++a) s += box(a, b, x, y);
  return s;
}

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Rank of a rational matrix by fraction-exact Gaussian elimination.
template <typename Scalar>
int exact_rank(std::vector<std::vector<Scalar>> rows, std::size_t cols) {
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t pivot = static_cast<std::size_t>(rank);
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[static_cast<std::size_t>(rank)]);
    const auto& prow = rows[static_cast<std::size_t>(rank)];
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      const Scalar factor = rows[r][c] / prow[c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= factor * prow[k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

BoxState::BoxState(int n_x, int n_y, int d_a, int d_b, std::vector<Rational> table, NoCheck)
    : n_x_(n_x), n_y_(n_y), d_a_(d_a), d_b_(d_b), table_(std::move(table)) {
  check_shape(n_x, n_y, d_a, d_b, table_.size());
}

BoxState::BoxState(int n_x, int n_y, int d_a, int d_b, std::vector<Rational> table)
    : BoxState(n_x, n_y, d_a, d_b, std::move(table), NoCheck{}) {
  const auto report = check_no_signalling(*this);
  if (!report.ok) throw PreconditionError("invalid box: " + report.failures.front());
}

BoxState BoxState::unchecked(int n_x, int n_y, int d_a, int d_b, std::vector<Rational> table) {
  return BoxState(n_x, n_y, d_a, d_b, std::move(table), NoCheck{});
}

NoSignallingReport check_no_signalling(const BoxState& box) {
  NoSignallingReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.failures.push_back(std::move(msg));
  };
  const int nx = box.settings_a(), ny = box.settings_b(), da = box.outcomes_a(), db = box.outcomes_b();
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
          if (box(a, b, x, y) < 0)
            fail("negative entry p(" + std::to_string(a) + std::to_string(b) + "|" + std::to_string(x) +
                 std::to_string(y) + ")");
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      Rational s = 0;
      for (int a = 0; a < da; ++a) s += marginal_a(box, a, x, y);
      if (s != 1)
        fail("setting pair (" + std::to_string(x) + "," + std::to_string(y) + ") sums to " + rational_to_string(s));
    }
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < da; ++a)
      for (int y = 1; y < ny; ++y)
        if (marginal_a(box, a, x, y) != marginal_a(box, a, x, 0))
          fail("Alice's marginal p(a=" + std::to_string(a) + "|x=" + std::to_string(x) + ") depends on y");
  for (int y = 0; y < ny; ++y)
    for (int b = 0; b < db; ++b)
      for (int x = 1; x < nx; ++x)
        if (marginal_b(box, b, x, y) != marginal_b(box, b, 0, y))
          fail("Bob's marginal p(b=" + std::to_string(b) + "|y=" + std::to_string(y) + ") depends on x");
  return report;
}

BoxState standard_pr_box() {
  std::vector<Rational> t(16);
  BoxState shape = BoxState::unchecked(2, 2, 2, 2, t);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          if ((a + b) % 2 == (x * y) % 2) t[shape.index(a, b, x, y)] = Rational(1, 2);
  return BoxState(2, 2, 2, 2, std::move(t));
}

BoxState pr_box_k(int k, int d_a, int d_b) {
  if (k < 2 || k > std::min(d_a, d_b))
    throw PreconditionError("pr_box_k needs 2 <= k <= min(d_A, d_B), got k=" + std::to_string(k));
  std::vector<Rational> t(static_cast<std::size_t>(4 * d_a * d_b));
  BoxState shape = BoxState::unchecked(2, 2, d_a, d_b, t);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          if (((b - a - x * y) % k + k) % k == 0) t[shape.index(a, b, x, y)] = Rational(1, k);
  return BoxState(2, 2, d_a, d_b, std::move(t));
}

LocalRelabeling LocalRelabeling::identity(Side side, int settings, int outcomes) {
  LocalRelabeling r;
  r.side = side;
  r.setting_perm.resize(static_cast<std::size_t>(settings));
  std::iota(r.setting_perm.begin(), r.setting_perm.end(), 0);
  std::vector<int> id(static_cast<std::size_t>(outcomes));
  std::iota(id.begin(), id.end(), 0);
  r.outcome_perms.assign(static_cast<std::size_t>(settings), id);
  return r;
}

bool LocalRelabeling::is_identity() const {
  for (std::size_t i = 0; i < setting_perm.size(); ++i)
    if (setting_perm[i] != static_cast<int>(i)) return false;
  for (const auto& p : outcome_perms)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] != static_cast<int>(i)) return false;
  return true;
}

namespace {

bool is_bijection(const std::vector<int>& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : p) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

}  // namespace

BoxState apply_relabeling(const BoxState& box, const LocalRelabeling& r) {
  const bool alice = r.side == Side::A;
  const int settings = alice ? box.settings_a() : box.settings_b();
  const int outcomes = alice ? box.outcomes_a() : box.outcomes_b();
  if (!is_bijection(r.setting_perm, settings) || static_cast<int>(r.outcome_perms.size()) != settings)
    throw StructuralError("relabeling does not match the box's settings");
  for (const auto& p : r.outcome_perms)
    if (!is_bijection(p, outcomes)) throw StructuralError("relabeling does not match the box's outcomes");

  std::vector<Rational> t(box.table().size());
  for (int a = 0; a < box.outcomes_a(); ++a)
    for (int b = 0; b < box.outcomes_b(); ++b)
      for (int x = 0; x < box.settings_a(); ++x)
        for (int y = 0; y < box.settings_b(); ++y) {
          int na = a, nb = b, nx = x, ny = y;
          if (alice) {
            nx = r.setting_perm[static_cast<std::size_t>(x)];
            na = r.outcome_perms[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
          } else {
            ny = r.setting_perm[static_cast<std::size_t>(y)];
            nb = r.outcome_perms[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)];
          }
          t[box.index(na, nb, nx, ny)] = box(a, b, x, y);
        }
  return BoxState::unchecked(box.settings_a(), box.settings_b(), box.outcomes_a(), box.outcomes_b(), std::move(t));
}

BoxState swap_parties(const BoxState& box) {
  BoxState shape = BoxState::unchecked(box.settings_b(), box.settings_a(), box.outcomes_b(), box.outcomes_a(),
                                       std::vector<Rational>(box.table().size()));
  std::vector<Rational> t(box.table().size());
  for (int a = 0; a < box.outcomes_a(); ++a)
    for (int b = 0; b < box.outcomes_b(); ++b)
      for (int x = 0; x < box.settings_a(); ++x)
        for (int y = 0; y < box.settings_b(); ++y) t[shape.index(b, a, y, x)] = box(a, b, x, y);
  return BoxState::unchecked(box.settings_b(), box.settings_a(), box.outcomes_b(), box.outcomes_a(), std::move(t));
}

namespace {

class RelabelingSearch {
 public:
  RelabelingSearch(const BoxState& from, const BoxState& to) : from_(from), to_(to) {
    sperm_a_ = all_permutations(from.settings_a());
    sperm_b_ = all_permutations(from.settings_b());
    operm_a_ = all_permutations(from.outcomes_a());
    operm_b_ = all_permutations(from.outcomes_b());
    alice_ = LocalRelabeling::identity(Side::A, from.settings_a(), from.outcomes_a());
    bob_ = LocalRelabeling::identity(Side::B, from.settings_b(), from.outcomes_b());
  }

  bool run() {
    for (const auto& sa : sperm_a_) {
      alice_.setting_perm = sa;
      for (const auto& sb : sperm_b_) {
        bob_.setting_perm = sb;
        if (assign(0)) return true;
      }
    }
    return false;
  }

  const LocalRelabeling& alice() const { return alice_; }
  const LocalRelabeling& bob() const { return bob_; }

 private:
  // Steps alternate tau_A0, tau_B0, tau_A1, tau_B1, ...; each step checks
  // the setting pairs whose outcome permutations are now all fixed.
  bool assign(int step) {
    const int nx = from_.settings_a(), ny = from_.settings_b();
    const int steps = 2 * std::max(nx, ny);
    if (step == steps) return true;
    const bool alice_turn = step % 2 == 0;
    const int setting = step / 2;
    if (alice_turn ? setting >= nx : setting >= ny) return assign(step + 1);
    const auto& perms = alice_turn ? operm_a_ : operm_b_;
    auto& slot = alice_turn ? alice_.outcome_perms[static_cast<std::size_t>(setting)]
                            : bob_.outcome_perms[static_cast<std::size_t>(setting)];
    for (const auto& p : perms) {
      slot = p;
      if (consistent(step) && assign(step + 1)) return true;
    }
    return false;
  }

  bool fixed_a(int x, int step) const { return 2 * x <= step; }
  bool fixed_b(int y, int step) const { return 2 * y + 1 <= step; }

  bool consistent(int step) const {
    const bool alice_turn = step % 2 == 0;
    const int setting = step / 2;
    for (int x = 0; x < from_.settings_a(); ++x)
      for (int y = 0; y < from_.settings_b(); ++y) {
        const bool involves = alice_turn ? x == setting : y == setting;
        if (!involves || !fixed_a(x, step) || !fixed_b(y, step)) continue;
        if (!pair_matches(x, y)) return false;
      }
    return true;
  }

  bool pair_matches(int x, int y) const {
    const int tx = alice_.setting_perm[static_cast<std::size_t>(x)];
    const int ty = bob_.setting_perm[static_cast<std::size_t>(y)];
    const auto& pa = alice_.outcome_perms[static_cast<std::size_t>(x)];
    const auto& pb = bob_.outcome_perms[static_cast<std::size_t>(y)];
    for (int a = 0; a < from_.outcomes_a(); ++a)
      for (int b = 0; b < from_.outcomes_b(); ++b)
        if (from_(a, b, x, y) != to_(pa[static_cast<std::size_t>(a)], pb[static_cast<std::size_t>(b)], tx, ty))
          return false;
    return true;
  }

  const BoxState& from_;
  const BoxState& to_;
  std::vector<std::vector<int>> sperm_a_, sperm_b_, operm_a_, operm_b_;
  LocalRelabeling alice_, bob_;
};

}  // namespace

std::optional<std::pair<LocalRelabeling, LocalRelabeling>> find_local_relabeling(const BoxState& from,
                                                                                  const BoxState& to) {
  if (!from.same_shape(to)) throw StructuralError("boxes have different shapes");
  if (std::max(from.settings_a(), from.settings_b()) > 3 || std::max(from.outcomes_a(), from.outcomes_b()) > 5)
    throw CapacityError("relabeling search is limited to 3 settings and 5 outcomes per side");
  RelabelingSearch search(from, to);
  if (!search.run()) return std::nullopt;
  return std::pair{search.alice(), search.bob()};
}

ExchangeCertificate check_local_exchangeability(const BoxState& box) {
  const auto ns = check_no_signalling(box);
  if (!ns.ok) throw PreconditionError("box is not a valid no-signalling box: " + ns.failures.front());
  if (box.settings_a() != box.settings_b() || box.outcomes_a() != box.outcomes_b())
    throw PreconditionError("local exchange needs identical shapes on both sides");
  ExchangeCertificate cert;
  if (auto found = find_local_relabeling(box, swap_parties(box))) {
    cert.found = true;
    cert.alice = found->first;
    cert.bob = found->second;
  }
  return cert;
}

bool is_extreme(const BoxState& box) {
  const std::size_t n = box.table().size();
  const int nx = box.settings_a(), ny = box.settings_b(), da = box.outcomes_a(), db = box.outcomes_b();
  std::vector<std::vector<Rational>> rows;
  auto new_row = [&]() -> std::vector<Rational>& { return rows.emplace_back(n, Rational(0)); };

  for (std::size_t i = 0; i < n; ++i)
    if (box.table()[i] == 0) new_row()[i] = 1;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      auto& row = new_row();
      for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b) row[box.index(a, b, x, y)] = 1;
    }
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < da; ++a)
      for (int y = 1; y < ny; ++y) {
        auto& row = new_row();
        for (int b = 0; b < db; ++b) {
          row[box.index(a, b, x, y)] += 1;
          row[box.index(a, b, x, 0)] -= 1;
        }
      }
  for (int y = 0; y < ny; ++y)
    for (int b = 0; b < db; ++b)
      for (int x = 1; x < nx; ++x) {
        auto& row = new_row();
        for (int a = 0; a < da; ++a) {
          row[box.index(a, b, x, y)] += 1;
          row[box.index(a, b, 0, y)] -= 1;
        }
      }
  return exact_rank(std::move(rows), n) == static_cast<int>(n);
}

std::string rational_to_string(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q) << '/' << boost::multiprecision::denominator(q);
  return os.str();
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(text));
    const boost::multiprecision::cpp_int num(text.substr(0, slash));
    const boost::multiprecision::cpp_int den(text.substr(slash + 1));
    if (den == 0) throw StructuralError("zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw StructuralError("malformed rational '" + text + "'");
  }
}

nlohmann::json box_to_json(const BoxState& box) {
  nlohmann::json p = nlohmann::json::array();
  for (int a = 0; a < box.outcomes_a(); ++a) {
    nlohmann::json pa = nlohmann::json::array();
    for (int b = 0; b < box.outcomes_b(); ++b) {
      nlohmann::json pb = nlohmann::json::array();
      for (int x = 0; x < box.settings_a(); ++x) {
        nlohmann::json px = nlohmann::json::array();
        for (int y = 0; y < box.settings_b(); ++y) px.push_back(rational_to_string(box(a, b, x, y)));
        pb.push_back(std::move(px));
      }
      pa.push_back(std::move(pb));
    }
    p.push_back(std::move(pa));
  }
  return {{"settings", {box.settings_a(), box.settings_b()}},
          {"outcomes", {box.outcomes_a(), box.outcomes_b()}},
          {"p", std::move(p)}};
}

BoxState box_from_json(const nlohmann::json& j) {
  auto pair_field = [&](const char* key) {
    if (!j.is_object() || !j.contains(key)) throw StructuralError(std::string("box: missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
      throw StructuralError(std::string("box.") + key + ": expected two integers");
    return std::pair{v[0].get<int>(), v[1].get<int>()};
  };
  const auto [nx, ny] = pair_field("settings");
  const auto [da, db] = pair_field("outcomes");
  if (!j.contains("p")) throw StructuralError("box: missing field 'p'");
  const std::size_t size = static_cast<std::size_t>(nx) * ny * da * db;
  check_shape(nx, ny, da, db, size);
  std::vector<Rational> t(size);
  BoxState shape = BoxState::unchecked(nx, ny, da, db, t);
  const auto& p = j.at("p");
  auto expect_array = [](const nlohmann::json& v, int n, const std::string& where) {
    if (!v.is_array() || static_cast<int>(v.size()) != n)
      throw StructuralError(where + ": expected an array of length " + std::to_string(n));
  };
  expect_array(p, da, "box.p");
  for (int a = 0; a < da; ++a) {
    const std::string wa = "box.p[" + std::to_string(a) + "]";
    expect_array(p[a], db, wa);
    for (int b = 0; b < db; ++b) {
      const std::string wb = wa + "[" + std::to_string(b) + "]";
      expect_array(p[a][b], nx, wb);
      for (int x = 0; x < nx; ++x) {
        const std::string wx = wb + "[" + std::to_string(x) + "]";
        expect_array(p[a][b][x], ny, wx);
        for (int y = 0; y < ny; ++y) {
          const auto& e = p[a][b][x][y];
          const std::string wy = wx + "[" + std::to_string(y) + "]";
          if (e.is_string()) {
            try {
              t[shape.index(a, b, x, y)] = parse_rational(e.get<std::string>());
            } catch (const StructuralError& err) {
              throw StructuralError(wy + ": " + err.what());
            }
          } else if (e.is_number_integer()) {
            t[shape.index(a, b, x, y)] = Rational(e.get<long long>());
          } else {
            throw StructuralError(wy + ": expected a rational string \"num/den\"");
          }
        }
      }
    }
  }
  return BoxState::unchecked(nx, ny, da, db, std::move(t));
}

nlohmann::json relabeling_to_json(const LocalRelabeling& r) {
  return {{"side", r.side == Side::A ? "A" : "B"},
          {"setting_perm", r.setting_perm},
          {"outcome_perms", r.outcome_perms}};
}

}  // namespace entmix::boxworld
