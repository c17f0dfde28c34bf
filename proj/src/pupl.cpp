#include "pucl/pupl.hpp"

#include <cmath>
#include <limits>

#include "pucl/error.hpp"

namespace pucl {

double potential(const Matrix& z, const Vector& mu_p, const Vector& mu_n) {
  if (z.cols() != mu_p.size() || z.cols() != mu_n.size())
    fail(ErrorKind::kDimMismatch, "potential: centroid dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double dp = (z.row(i).transpose() - mu_p).squaredNorm();
    double dn = (z.row(i).transpose() - mu_n).squaredNorm();
    acc += std::min(dp, dn);
  }
  return acc;
}

std::pair<Vector, Vector> pupl_init(const Matrix& z_labeled,
                                    const Matrix& z_unlabeled, RngStream& rng) {
  if (z_labeled.rows() == 0)
    fail(ErrorKind::kEmptyPositives, "pupl_init: no labeled rows");
  if (z_unlabeled.rows() == 0)
    fail(ErrorKind::kEmptyUnlabeled, "pupl_init: no unlabeled rows");
  Vector mu_p = z_labeled.colwise().mean().transpose();
  std::vector<double> d2(z_unlabeled.rows());
  for (Eigen::Index i = 0; i < z_unlabeled.rows(); ++i)
    d2[i] = (z_unlabeled.row(i).transpose() - mu_p).squaredNorm();
  std::size_t pick = rng.discrete(d2);
  Vector mu_n = z_unlabeled.row(static_cast<Eigen::Index>(pick)).transpose();
  return {mu_p, mu_n};
}

namespace {

// assignment given centroids; ties and pinned rows go to P
void assign_rows(const Matrix& z, const Vector& mu_p, const Vector& mu_n,
                 const std::vector<char>* pinned, std::vector<int>& out) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (pinned && (*pinned)[i]) {
      out[i] = 1;
      continue;
    }
    double dp = (z.row(i).transpose() - mu_p).squaredNorm();
    double dn = (z.row(i).transpose() - mu_n).squaredNorm();
    out[i] = dp <= dn ? 1 : 0;
  }
}

Eigen::Index farthest_row(const Matrix& z, const Vector& from) {
  Eigen::Index best = 0;
  double best_d = -1.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double d = (z.row(i).transpose() - from).squaredNorm();
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

Clustering lloyd(const Matrix& z, Vector mu_p, Vector mu_n, int max_iter,
                 double tol, const std::vector<char>* pinned_positive,
                 std::vector<double>* potential_trace) {
  if (max_iter < 1) fail(ErrorKind::kInvalidArgs, "lloyd: max_iter >= 1");
  const Eigen::Index n = z.rows();
  Clustering result;
  result.assignments.assign(static_cast<std::size_t>(n), 0);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    assign_rows(z, mu_p, mu_n, pinned_positive, result.assignments);
    Vector sum_p = Vector::Zero(z.cols());
    Vector sum_n = Vector::Zero(z.cols());
    long count_p = 0, count_n = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (result.assignments[i] == 1) {
        sum_p += z.row(i).transpose();
        ++count_p;
      } else {
        sum_n += z.row(i).transpose();
        ++count_n;
      }
    }
    Vector new_p = count_p ? Vector(sum_p / count_p) : mu_p;
    Vector new_n = count_n ? Vector(sum_n / count_n) : mu_n;
    if (count_p == 0) new_p = z.row(farthest_row(z, new_n)).transpose();
    if (count_n == 0) new_n = z.row(farthest_row(z, new_p)).transpose();
    double shift = std::max((new_p - mu_p).lpNorm<Eigen::Infinity>(),
                            (new_n - mu_n).lpNorm<Eigen::Infinity>());
    mu_p = new_p;
    mu_n = new_n;
    if (potential_trace)
      potential_trace->push_back(potential(z, mu_p, mu_n));
    if (shift < tol) {
      ++iter;
      break;
    }
  }
  assign_rows(z, mu_p, mu_n, pinned_positive, result.assignments);
  result.mu_p = mu_p;
  result.mu_n = mu_n;
  result.potential = potential(z, mu_p, mu_n);
  result.iterations = iter;
  return result;
}

PuplResult pupl(const Matrix& z, const std::vector<char>& labeled_mask,
                std::uint64_t seed, int max_iter, double tol) {
  const Eigen::Index n = z.rows();
  if (static_cast<Eigen::Index>(labeled_mask.size()) != n)
    fail(ErrorKind::kDimMismatch, "pupl: mask size mismatch");
  long n_l = 0;
  for (char c : labeled_mask) n_l += c ? 1 : 0;
  if (n_l == 0) fail(ErrorKind::kEmptyPositives, "pupl: no labeled rows");
  if (n_l == n) fail(ErrorKind::kEmptyUnlabeled, "pupl: no unlabeled rows");

  Matrix z_l(n_l, z.cols()), z_u(n - n_l, z.cols());
  Eigen::Index il = 0, iu = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labeled_mask[i])
      z_l.row(il++) = z.row(i);
    else
      z_u.row(iu++) = z.row(i);
  }
  RngStream rng(seed, 10);
  auto [mu_p, mu_n] = pupl_init(z_l, z_u, rng);

  PuplResult result;
  result.one_step_potential = potential(z, mu_p, mu_n);
  result.clustering = lloyd(z, mu_p, mu_n, max_iter, tol, &labeled_mask,
                            &result.potential_trace);
  result.pseudo_labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    result.pseudo_labels[i] =
        labeled_mask[i] ? 1 : result.clustering.assignments[i];
  return result;
}

std::pair<Vector, Vector> kmeanspp_init(const Matrix& z, RngStream& rng) {
  if (z.rows() < 2) fail(ErrorKind::kTooFewRows, "kmeanspp: need >= 2 rows");
  Eigen::Index first = static_cast<Eigen::Index>(
      rng.below(static_cast<std::uint64_t>(z.rows())));
  Vector c1 = z.row(first).transpose();
  std::vector<double> d2(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    d2[i] = (z.row(i).transpose() - c1).squaredNorm();
  Eigen::Index second =
      static_cast<Eigen::Index>(rng.discrete(d2));
  return {c1, z.row(second).transpose()};
}

Clustering kmeanspp(const Matrix& z, std::uint64_t seed, int max_iter,
                    double tol) {
  RngStream rng(seed, 11);
  auto [c1, c2] = kmeanspp_init(z, rng);
  return lloyd(z, c1, c2, max_iter, tol);
}

BruteForce2Means brute_force_optimal_2means(const Matrix& z) {
  const int n = static_cast<int>(z.rows());
  if (n > 20) fail(ErrorKind::kTooLarge, "brute_force_optimal_2means: rows > 20");
  if (n < 1) fail(ErrorKind::kTooFewRows, "brute_force_optimal_2means: empty");
  BruteForce2Means best;
  best.phi_star = std::numeric_limits<double>::infinity();
  best.partition.assign(n, 0);
  // row 0 pinned to side 1; iterate over the remaining n-1 memberships
  const std::uint64_t limit = 1ull << (n - 1);
  std::vector<int> side(n);
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    side[0] = 1;
    for (int i = 1; i < n; ++i) side[i] = (mask >> (i - 1)) & 1 ? 1 : 0;
    Vector sum1 = Vector::Zero(z.cols());
    Vector sum0 = Vector::Zero(z.cols());
    int c1 = 0, c0 = 0;
    for (int i = 0; i < n; ++i) {
      if (side[i]) {
        sum1 += z.row(i).transpose();
        ++c1;
      } else {
        sum0 += z.row(i).transpose();
        ++c0;
      }
    }
    double phi = 0.0;
    if (c1) {
      Vector m1 = sum1 / c1;
      for (int i = 0; i < n; ++i)
        if (side[i]) phi += (z.row(i).transpose() - m1).squaredNorm();
    }
    if (c0) {
      Vector m0 = sum0 / c0;
      for (int i = 0; i < n; ++i)
        if (!side[i]) phi += (z.row(i).transpose() - m0).squaredNorm();
    }
    if (phi < best.phi_star) {
      best.phi_star = phi;
      best.partition = side;
    }
  }
  return best;
}

}  // namespace pucl
