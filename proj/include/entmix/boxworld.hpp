#pragma once

// Bipartite no-signalling boxes p(ab|xy) in exact rational arithmetic.

#include "entmix/common.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace entmix::boxworld {

using Rational = boost::multiprecision::cpp_rational;

class BoxState {
 public:
  /// Table in row-major order over (a, b, x, y). Throws StructuralError on a
  /// size mismatch and PreconditionError when an entry is negative, a
  /// setting pair is not normalized, or the table signals.
  BoxState(int n_x, int n_y, int d_a, int d_b, std::vector<Rational> table);

  /// Skips the probability checks; only the shape is validated.
  static BoxState unchecked(int n_x, int n_y, int d_a, int d_b, std::vector<Rational> table);

  int settings_a() const { return n_x_; }
  int settings_b() const { return n_y_; }
  int outcomes_a() const { return d_a_; }
  int outcomes_b() const { return d_b_; }

  std::size_t index(int a, int b, int x, int y) const {
    return ((static_cast<std::size_t>(a) * d_b_ + b) * n_x_ + x) * n_y_ + y;
  }
  const Rational& operator()(int a, int b, int x, int y) const { return table_[index(a, b, x, y)]; }
  const std::vector<Rational>& table() const { return table_; }

  bool same_shape(const BoxState& other) const {
    return n_x_ == other.n_x_ && n_y_ == other.n_y_ && d_a_ == other.d_a_ && d_b_ == other.d_b_;
  }
  bool operator==(const BoxState& other) const { return same_shape(other) && table_ == other.table_; }

 private:
  struct NoCheck {};
  BoxState(int n_x, int n_y, int d_a, int d_b, std::vector<Rational> table, NoCheck);

  int n_x_;
  int n_y_;
  int d_a_;
  int d_b_;
  std::vector<Rational> table_;
};

struct NoSignallingReport {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Nonnegativity, normalization per setting pair, and both no-signalling
/// conditions, all checked exactly.
NoSignallingReport check_no_signalling(const BoxState& box);

/// p = 1/2 when a + b = xy (mod 2).
BoxState standard_pr_box();

/// p = 1/k when b - a = xy (mod k) with a, b < k; two settings per side.
BoxState pr_box_k(int k, int d_a, int d_b);

enum class Side { A, B };

struct LocalRelabeling {
  Side side = Side::A;
  /// x -> setting_perm[x].
  std::vector<int> setting_perm;
  /// Under original setting x, outcome a -> outcome_perms[x][a].
  std::vector<std::vector<int>> outcome_perms;

  static LocalRelabeling identity(Side side, int settings, int outcomes);
  bool is_identity() const;
  bool operator==(const LocalRelabeling&) const = default;
};

BoxState apply_relabeling(const BoxState& box, const LocalRelabeling& r);

/// Exchanges x with y and a with b.
BoxState swap_parties(const BoxState& box);

/// (r_A, r_B) with (r_A x r_B)(from) = to, searched identity-first in
/// lexicographic order. Throws CapacityError beyond 3 settings or 5 outcomes.
std::optional<std::pair<LocalRelabeling, LocalRelabeling>> find_local_relabeling(const BoxState& from,
                                                                                  const BoxState& to);

struct ExchangeCertificate {
  bool found = false;
  LocalRelabeling alice;
  LocalRelabeling bob;
};

/// Relabelings turning the box into its party swap. Throws PreconditionError
/// when the box signals or the two sides have different shapes.
ExchangeCertificate check_local_exchangeability(const BoxState& box);

/// Vertex test: the equality constraints active at the box (vanishing
/// entries, normalization, no-signalling) pin down a unique table.
bool is_extreme(const BoxState& box);

std::string rational_to_string(const Rational& q);
Rational parse_rational(const std::string& text);

nlohmann::json box_to_json(const BoxState& box);
/// Throws StructuralError with the offending location on malformed input.
/// Probability invariants are left to check_no_signalling.
BoxState box_from_json(const nlohmann::json& j);
nlohmann::json relabeling_to_json(const LocalRelabeling& r);

}  // namespace entmix::boxworld
