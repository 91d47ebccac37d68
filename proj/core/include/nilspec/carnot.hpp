#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace nilspec::carnot {

// Graded nilpotent Lie algebra given by a basis with negative integer
// degrees and dense structure constants c[i][j][k], [e_i, e_j] = sum_k
// c[i][j][k] e_k. Immutable after construction; construction validates
// antisymmetry, the Jacobi identity, grading compatibility, and step <= 3
// (the exact-BCH guarantee).
class GradedNilpotentLieAlgebra {
 public:
  static GradedNilpotentLieAlgebra create(std::vector<int> degrees,
                                          std::vector<double> structure_constants);

  int dim() const { return dim_; }
  int step() const { return step_; }
  const std::vector<int>& degrees() const { return degrees_; }
  double c(int i, int j, int k) const { return structure_[(i * dim_ + j) * dim_ + k]; }

  // [x, y] in basis coordinates.
  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

 private:
  GradedNilpotentLieAlgebra(std::vector<int> degrees, std::vector<double> structure);

  int dim_;
  int step_;
  std::vector<int> degrees_;
  std::vector<double> structure_;
};

using AlgebraPtr = std::shared_ptr<const GradedNilpotentLieAlgebra>;

// Exponential coordinates of the first kind on the simply connected group.
struct GroupElement {
  Eigen::VectorXd coords;
};

struct Dilation {
  double lambda = 1.0;  // nonzero
};

int homogeneous_dimension(const GradedNilpotentLieAlgebra& alg);

// Checks antisymmetry, Jacobi, grading compatibility, and step <= 3 on raw
// data. Violations are returned as messages; an empty list means valid.
std::vector<std::string> validate(const std::vector<int>& degrees,
                                  const std::vector<double>& structure_constants);

// Group product in exponential coordinates via the truncated
// Baker-Campbell-Hausdorff series, exact for step <= 3.
GroupElement bch_multiply(const GradedNilpotentLieAlgebra& alg, const GroupElement& g,
                          const GroupElement& h);

GroupElement dilate(const GradedNilpotentLieAlgebra& alg, const Dilation& d,
                    const GroupElement& g);

GroupElement inverse(const GroupElement& g);

// Jacobian determinant of dilate(lambda, .); equals lambda^n for lambda > 0.
double dilation_jacobian(const GradedNilpotentLieAlgebra& alg, double lambda);

// Built-in algebras.
AlgebraPtr abelian(int d);
AlgebraPtr heisenberg(int k);  // dimension 2k+1, [X_i, Y_i] = Z
AlgebraPtr carnot235();        // step-3, growth vector (2,3,5)

// Loads {"degrees": [...], "brackets": [[i, j, [[k, c], ...]], ...]} with
// 0-based indices.
AlgebraPtr from_json(const nlohmann::json& doc);

// "abelian:d", "heisenberg:k", "carnot235".
AlgebraPtr by_name(const std::string& name);

}  // namespace nilspec::carnot
