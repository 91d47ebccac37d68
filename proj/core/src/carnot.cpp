#include "nilspec/carnot.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nilspec::carnot {

namespace {

int max_step(const std::vector<int>& degrees) {
  int step = 1;
  for (int d : degrees) step = std::max(step, -d);
  return step;
}

}  // namespace

GradedNilpotentLieAlgebra::GradedNilpotentLieAlgebra(std::vector<int> degrees,
                                                     std::vector<double> structure)
    : dim_(static_cast<int>(degrees.size())),
      step_(max_step(degrees)),
      degrees_(std::move(degrees)),
      structure_(std::move(structure)) {}

GradedNilpotentLieAlgebra GradedNilpotentLieAlgebra::create(
    std::vector<int> degrees, std::vector<double> structure_constants) {
  auto violations = validate(degrees, structure_constants);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid graded Lie algebra: " << violations.front();
    if (violations.size() > 1) msg << " (+" << violations.size() - 1 << " more)";
    throw std::invalid_argument(msg.str());
  }
  return GradedNilpotentLieAlgebra(std::move(degrees), std::move(structure_constants));
}

Eigen::VectorXd GradedNilpotentLieAlgebra::bracket(const Eigen::VectorXd& x,
                                                   const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (y[j] == 0.0) continue;
      const double xy = x[i] * y[j];
      for (int k = 0; k < dim_; ++k) out[k] += xy * c(i, j, k);
    }
  }
  return out;
}

int homogeneous_dimension(const GradedNilpotentLieAlgebra& alg) {
  int n = 0;
  for (int d : alg.degrees()) n += -d;
  return n;
}

std::vector<std::string> validate(const std::vector<int>& degrees,
                                  const std::vector<double>& structure_constants) {
  std::vector<std::string> out;
  const int dim = static_cast<int>(degrees.size());
  if (dim == 0) {
    out.push_back("empty basis");
    return out;
  }
  for (int d : degrees) {
    if (d >= 0) {
      out.push_back("degrees must be negative integers");
      break;
    }
  }
  if (max_step(degrees) > 3) out.push_back("step > 3 unsupported (exact BCH guarantee)");
  if (structure_constants.size() != static_cast<std::size_t>(dim) * dim * dim) {
    out.push_back("structure constant array has wrong size");
    return out;
  }
  auto c = [&](int i, int j, int k) { return structure_constants[(i * dim + j) * dim + k]; };

  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        if (c(i, j, k) != -c(j, i, k)) {
          std::ostringstream msg;
          msg << "antisymmetry violated at c[" << i << "][" << j << "][" << k << "]";
          out.push_back(msg.str());
          goto antisym_done;
        }
      }
antisym_done:;

  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        if (c(i, j, k) != 0.0 && degrees[k] != degrees[i] + degrees[j]) {
          std::ostringstream msg;
          msg << "grading violated: [e" << i << ", e" << j << "] hits e" << k
              << " of degree " << degrees[k] << " != " << degrees[i] + degrees[j];
          out.push_back(msg.str());
          goto grading_done;
        }
      }
grading_done:;

  // Jacobi on all basis triples: [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0.
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int k = j + 1; k < dim; ++k) {
        for (int l = 0; l < dim; ++l) {
          double s = 0.0;
          for (int m = 0; m < dim; ++m)
            s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
          if (s != 0.0) {
            std::ostringstream msg;
            msg << "Jacobi violated on triple (" << i << "," << j << "," << k << ")";
            out.push_back(msg.str());
            goto jacobi_done;
          }
        }
      }
jacobi_done:;

  return out;
}

GroupElement bch_multiply(const GradedNilpotentLieAlgebra& alg, const GroupElement& g,
                          const GroupElement& h) {
  if (alg.step() > 3) throw std::invalid_argument("bch_multiply: step > 3 unsupported");
  const Eigen::VectorXd& x = g.coords;
  const Eigen::VectorXd& y = h.coords;
  if (x.size() != alg.dim() || y.size() != alg.dim())
    throw std::invalid_argument("bch_multiply: coordinate length mismatch");
  Eigen::VectorXd xy = alg.bracket(x, y);
  Eigen::VectorXd z = x + y + 0.5 * xy;
  // Triple-bracket terms terminate the series for step <= 3.
  z += (alg.bracket(x, xy) - alg.bracket(y, xy)) / 12.0;
  return GroupElement{std::move(z)};
}

GroupElement dilate(const GradedNilpotentLieAlgebra& alg, const Dilation& d,
                    const GroupElement& g) {
  if (d.lambda == 0.0) throw std::invalid_argument("dilate: lambda must be nonzero");
  Eigen::VectorXd out = g.coords;
  for (int i = 0; i < alg.dim(); ++i)
    out[i] *= std::pow(d.lambda, -alg.degrees()[i]);
  return GroupElement{std::move(out)};
}

GroupElement inverse(const GroupElement& g) { return GroupElement{-g.coords}; }

double dilation_jacobian(const GradedNilpotentLieAlgebra& alg, double lambda) {
  double det = 1.0;
  for (int d : alg.degrees()) det *= std::pow(lambda, -d);
  return det;
}

namespace {

AlgebraPtr build(std::vector<int> degrees,
                 const std::vector<std::tuple<int, int, int, double>>& brackets) {
  const int dim = static_cast<int>(degrees.size());
  std::vector<double> c(static_cast<std::size_t>(dim) * dim * dim, 0.0);
  auto at = [&](int i, int j, int k) -> double& { return c[(i * dim + j) * dim + k]; };
  for (const auto& [i, j, k, v] : brackets) {
    at(i, j, k) = v;
    at(j, i, k) = -v;
  }
  return std::make_shared<GradedNilpotentLieAlgebra>(
      GradedNilpotentLieAlgebra::create(std::move(degrees), std::move(c)));
}

}  // namespace

AlgebraPtr abelian(int d) {
  if (d < 1) throw std::invalid_argument("abelian: dimension must be positive");
  return build(std::vector<int>(d, -1), {});
}

AlgebraPtr heisenberg(int k) {
  if (k < 1) throw std::invalid_argument("heisenberg: k must be positive");
  std::vector<int> degrees(2 * k + 1, -1);
  degrees[2 * k] = -2;
  std::vector<std::tuple<int, int, int, double>> brackets;
  for (int i = 0; i < k; ++i) brackets.emplace_back(i, k + i, 2 * k, 1.0);
  return build(std::move(degrees), brackets);
}

AlgebraPtr carnot235() {
  // Basis: xi, eta (degree -1), [xi,eta] (degree -2), [xi,[xi,eta]],
  // [eta,[xi,eta]] (degree -3). All other brackets vanish by grading.
  return build({-1, -1, -2, -3, -3},
               {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}, {1, 2, 4, 1.0}});
}

AlgebraPtr from_json(const nlohmann::json& doc) {
  if (!doc.contains("degrees") || !doc["degrees"].is_array())
    throw std::invalid_argument("algebra json: missing \"degrees\" array");
  std::vector<int> degrees = doc["degrees"].get<std::vector<int>>();
  const int dim = static_cast<int>(degrees.size());
  std::vector<double> c(static_cast<std::size_t>(dim) * dim * dim, 0.0);
  auto at = [&](int i, int j, int k) -> double& { return c[(i * dim + j) * dim + k]; };
  if (doc.contains("brackets")) {
    for (const auto& entry : doc["brackets"]) {
      if (!entry.is_array() || entry.size() != 3)
        throw std::invalid_argument("algebra json: bracket entries are [i, j, terms]");
      int i = entry[0].get<int>();
      int j = entry[1].get<int>();
      if (i < 0 || i >= dim || j < 0 || j >= dim)
        throw std::invalid_argument("algebra json: bracket index out of range");
      for (const auto& term : entry[2]) {
        int k = term[0].get<int>();
        double v = term[1].get<double>();
        if (k < 0 || k >= dim)
          throw std::invalid_argument("algebra json: bracket target out of range");
        at(i, j, k) = v;
        at(j, i, k) = -v;
      }
    }
  }
  return std::make_shared<GradedNilpotentLieAlgebra>(
      GradedNilpotentLieAlgebra::create(std::move(degrees), std::move(c)));
}

AlgebraPtr by_name(const std::string& name) {
  if (name == "carnot235") return carnot235();
  auto colon = name.find(':');
  if (colon != std::string::npos) {
    std::string head = name.substr(0, colon);
    int arg = std::stoi(name.substr(colon + 1));
    if (head == "abelian") return abelian(arg);
    if (head == "heisenberg") return heisenberg(arg);
  }
  throw std::invalid_argument("unknown algebra name: " + name);
}

}  // namespace nilspec::carnot
