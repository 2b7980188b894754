#include "sph/roots.hpp"

#include <algorithm>
#include <map>

namespace sph {

std::vector<Rat> characteristic_polynomial(const RatMatrix& m) {
  // Faddeev–LeVerrier: exact over Q.
  const Eigen::Index n = m.rows();
  std::vector<Rat> coeff(n + 1);
  coeff[n] = 1;
  RatMatrix aux = RatMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    aux = m * aux;
    for (Eigen::Index i = 0; i < n; ++i) aux(i, i) += coeff[n - k + 1];
    coeff[n - k] = -(m * aux).trace() / Rat(k);
  }
  return coeff;
}

namespace {

std::vector<Int> divisors(const Int& value) {
  Int v = abs(value);
  std::vector<Int> out;
  for (Int i = 1; i * i <= v; ++i) {
    if (v % i == 0) {
      out.push_back(i);
      out.push_back(v / i);
    }
  }
  return out;
}

Rat eval_poly(const std::vector<Rat>& p, const Rat& x) {
  Rat r = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

// Divides p by (x - r) exactly; p must vanish at r.
std::vector<Rat> deflate(const std::vector<Rat>& p, const Rat& r) {
  std::vector<Rat> q(p.size() - 1);
  Rat carry = 0;
  for (size_t i = p.size(); i-- > 1;) {
    carry = p[i] + carry * r;
    q[i - 1] = carry;
  }
  return q;
}

}  // namespace

std::vector<std::pair<Rat, int>> rational_roots(const std::vector<Rat>& poly,
                                                int* unfactored_degree) {
  std::vector<Rat> p = poly;
  while (!p.empty() && p.back() == 0) p.pop_back();
  if (p.empty()) throw std::invalid_argument("zero polynomial");
  std::vector<std::pair<Rat, int>> roots;
  // Factor out x^m.
  int zero_mult = 0;
  while (p.size() > 1 && p.front() == 0) {
    ++zero_mult;
    p.erase(p.begin());
  }
  if (zero_mult > 0) roots.push_back({Rat(0), zero_mult});
  while (p.size() > 1) {
    // Clear denominators to apply the rational root test.
    Int l = 1;
    for (const Rat& c : p) l = lcm(l, c.get_den());
    Int a0 = Rat(p.front() * Rat(l)).get_num();
    Int an = Rat(p.back() * Rat(l)).get_num();
    bool found = false;
    for (const Int& num : divisors(a0)) {
      for (const Int& den : divisors(an)) {
        for (int sign : {1, -1}) {
          Rat cand(sign * num, den);
          cand.canonicalize();
          if (eval_poly(p, cand) == 0) {
            int mult = 0;
            while (p.size() > 1 && eval_poly(p, cand) == 0) {
              p = deflate(p, cand);
              ++mult;
            }
            roots.push_back({cand, mult});
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found) break;
  }
  if (unfactored_degree)
    *unfactored_degree = static_cast<int>(p.size()) - 1;
  return roots;
}

namespace {

// Eigenspace of m within v for eigenvalue lambda: v ∩ ker(m - lambda).
RationalSubspace eigenspace_within(const RatMatrix& m, const Rat& lambda,
                                   const RationalSubspace& v) {
  RatMatrix shifted = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) shifted(i, i) -= lambda;
  return intersection(v, kernel(shifted));
}

}  // namespace

std::vector<RootSpace> root_decomposition(const StructuredLieAlgebra& g,
                                          const RationalSubspace& a) {
  if (!g.is_abelian(a))
    throw std::invalid_argument("root_decomposition: torus not abelian");
  const Eigen::Index n = g.dim();

  struct Piece {
    RatRowVector weights;  // eigenvalue per torus basis vector so far
    RationalSubspace space;
  };
  std::vector<Piece> pieces{{RatRowVector(0), RationalSubspace::full(n)}};
  for (Eigen::Index k = 0; k < a.dim(); ++k) {
    RatMatrix ad_t = g.ad(a.basis_vector(k));
    int tail = 0;
    std::vector<std::pair<Rat, int>> eigs =
        rational_roots(characteristic_polynomial(ad_t), &tail);
    if (tail != 0)
      throw NonSemisimpleAction("ad eigenvalues not all rational");
    std::vector<Piece> next;
    for (const Piece& piece : pieces) {
      Eigen::Index covered = 0;
      for (const auto& [lambda, mult] : eigs) {
        RationalSubspace w = eigenspace_within(ad_t, lambda, piece.space);
        if (w.dim() == 0) continue;
        covered += w.dim();
        RatRowVector wts(k + 1);
        wts.head(k) = piece.weights;
        wts(k) = lambda;
        next.push_back({wts, w});
      }
      if (covered != piece.space.dim())
        throw NonSemisimpleAction("ad not diagonalizable over Q");
    }
    pieces = std::move(next);
  }

  // Merge pieces with equal weight vectors (cannot occur after full
  // refinement, but keeps the a.dim()==0 case uniform) and sort.
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
    for (Eigen::Index i = 0; i < x.weights.size(); ++i) {
      if (x.weights(i) != y.weights(i)) return x.weights(i) < y.weights(i);
    }
    return false;
  });
  std::vector<RootSpace> out;
  for (const Piece& piece : pieces) {
    RatRowVector w = piece.weights.size() == a.dim()
                         ? piece.weights
                         : RatRowVector(RatRowVector::Zero(a.dim()));
    out.push_back({LinearFunctional(a, w), piece.space});
  }

  // Cross-checks: direct sum and bracket grading.
  Eigen::Index total = 0;
  for (const auto& rs : out) total += rs.space.dim();
  if (total != n) throw NonSemisimpleAction("root spaces do not fill g");
  for (const auto& x : out)
    for (const auto& y : out) {
      RationalSubspace br = g.bracket_space(x.space, y.space);
      if (br.dim() == 0) continue;
      LinearFunctional s = x.root + y.root;
      bool found = false;
      for (const auto& z : out)
        if (z.root == s) {
          if (!z.space.contains(br))
            throw NonSemisimpleAction("bracket grading violated");
          found = true;
          break;
        }
      if (!found) throw NonSemisimpleAction("bracket grading violated");
    }
  return out;
}

}  // namespace sph
