#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pucl/matrix.hpp"
#include "pucl/rng.hpp"

namespace pucl {

struct Clustering {
  Vector mu_p;
  Vector mu_n;
  std::vector<int> assignments;  // 1 = cluster P, 0 = cluster N
  double potential = 0.0;
  int iterations = 0;
};

// phi = sum_i min(|z_i - mu_p|^2, |z_i - mu_n|^2)
double potential(const Matrix& z, const Vector& mu_p, const Vector& mu_n);

// mu_p = centroid of labeled rows; mu_n drawn from the unlabeled rows with
// probability proportional to squared distance to mu_p (uniform when all
// distances vanish).
std::pair<Vector, Vector> pupl_init(const Matrix& z_labeled,
                                    const Matrix& z_unlabeled, RngStream& rng);

// Alternating assignment/update from the given centroids. Rows flagged in
// pinned_positive are fixed members of cluster P. Ties go to P. An emptied
// cluster is reseated at the point farthest from the other centroid.
Clustering lloyd(const Matrix& z, Vector mu_p, Vector mu_n, int max_iter,
                 double tol, const std::vector<char>* pinned_positive = nullptr,
                 std::vector<double>* potential_trace = nullptr);

struct PuplResult {
  Clustering clustering;
  std::vector<int> pseudo_labels;   // labeled rows pinned to 1
  double one_step_potential = 0.0;  // potential of the seeded centroids
  std::vector<double> potential_trace;
};

PuplResult pupl(const Matrix& z, const std::vector<char>& labeled_mask,
                std::uint64_t seed, int max_iter = 100, double tol = 1e-8);

// Seeding by itself (uniform first center, D^2 second); used by the
// one-step potential comparisons.
std::pair<Vector, Vector> kmeanspp_init(const Matrix& z, RngStream& rng);
Clustering kmeanspp(const Matrix& z, std::uint64_t seed, int max_iter = 100,
                    double tol = 1e-8);

struct BruteForce2Means {
  double phi_star = 0.0;
  std::vector<int> partition;  // 1/0 side per row
};

// Exhaustive minimum over all 2^(n-1) bipartitions with centroids at the
// side means (the optimal 2-means always has this form). rows <= 20.
BruteForce2Means brute_force_optimal_2means(const Matrix& z);

}  // namespace pucl
