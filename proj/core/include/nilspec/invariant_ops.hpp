#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nilspec/carnot.hpp"

namespace nilspec::ops {

// One summand c * X_{w_0} ... X_{w_{k-1}} with a constant hom(E,F) block.
// The word is an enveloping-algebra word; no normal ordering is applied.
struct Term {
  std::complex<double> coeff{1.0, 0.0};
  std::vector<int> word;
  Eigen::MatrixXcd block;  // rows x cols, defaults to 1x1 identity
};

// Formal left-invariant homogeneous differential operator. Every term has
// the same total weight sum |degree(w_i)| = order (strict homogeneity) and
// the same block shape.
class HomogeneousOperator {
 public:
  static HomogeneousOperator create(carnot::AlgebraPtr alg, std::vector<Term> terms);

  const carnot::AlgebraPtr& algebra() const { return alg_; }
  const std::vector<Term>& terms() const { return terms_; }
  int order() const { return order_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  HomogeneousOperator(carnot::AlgebraPtr alg, std::vector<Term> terms, int order, int rows,
                      int cols)
      : alg_(std::move(alg)), terms_(std::move(terms)), order_(order), rows_(rows),
        cols_(cols) {}

  carnot::AlgebraPtr alg_;
  std::vector<Term> terms_;
  int order_;
  int rows_, cols_;
};

int heisenberg_order(const HomogeneousOperator& op);

// Composition b after a; order adds, words concatenate, blocks multiply.
HomogeneousOperator compose(const HomogeneousOperator& b, const HomogeneousOperator& a);

// Formal adjoint w.r.t. the invariant L^2 inner product: words reverse,
// generators pick up a sign (left-invariant fields are skew-adjoint),
// blocks conjugate-transpose. Order is preserved.
HomogeneousOperator formal_adjoint(const HomogeneousOperator& op);

HomogeneousOperator add(const HomogeneousOperator& a, const HomogeneousOperator& b);
HomogeneousOperator scale(std::complex<double> c, const HomogeneousOperator& op);

// Combines terms with identical words; drops zero terms.
HomogeneousOperator simplify(const HomogeneousOperator& op);

bool approx_equal(const HomogeneousOperator& a, const HomogeneousOperator& b,
                  double tol = 1e-12);

// Sequence A_0, A_1, ... with chaining block shapes and orders r_i >= 1.
struct ModelSequence {
  carnot::AlgebraPtr alg;
  std::vector<HomogeneousOperator> operators;
  std::vector<int> orders() const;
  static ModelSequence create(carnot::AlgebraPtr alg, std::vector<HomogeneousOperator> ops);
};

// Delta_i = (A_{i-1} A*_{i-1})^{s_{i-1}} + (A*_i A_i)^{s_i}, of order
// 2*kappa where r_{i-1} s_{i-1} = r_i s_i = kappa. At the ends of the
// sequence the missing summand is omitted.
HomogeneousOperator rumin_seshadri(const ModelSequence& seq, int i,
                                   const std::vector<int>& s);

// -sum X_i^2 over the degree -1 generators.
HomogeneousOperator sublaplacian(const carnot::AlgebraPtr& alg);

// Extends the algebra by one central direction of degree -order(op) and
// returns (extended algebra, op + d/dt) acting on the extension.
std::pair<carnot::AlgebraPtr, HomogeneousOperator> heat_extension(
    const HomogeneousOperator& op);

// {"terms": [{"coeff": [re, im], "word": [indices], "block": [[...]]}]}
HomogeneousOperator from_json(const carnot::AlgebraPtr& alg, const nlohmann::json& doc);
nlohmann::json to_json(const HomogeneousOperator& op);

}  // namespace nilspec::ops
