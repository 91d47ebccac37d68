#include "nilspec/invariant_ops.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace nilspec::ops {

namespace {

int word_weight(const carnot::GradedNilpotentLieAlgebra& alg, const std::vector<int>& word) {
  int w = 0;
  for (int idx : word) {
    if (idx < 0 || idx >= alg.dim())
      throw std::invalid_argument("operator word references basis index out of range");
    w += -alg.degrees()[idx];
  }
  return w;
}

}  // namespace

HomogeneousOperator HomogeneousOperator::create(carnot::AlgebraPtr alg,
                                                std::vector<Term> terms) {
  if (!alg) throw std::invalid_argument("operator needs an algebra");
  if (terms.empty()) throw std::invalid_argument("operator needs at least one term");
  for (auto& t : terms) {
    if (t.block.size() == 0) t.block = Eigen::MatrixXcd::Identity(1, 1);
  }
  const int rows = static_cast<int>(terms.front().block.rows());
  const int cols = static_cast<int>(terms.front().block.cols());
  const int order = word_weight(*alg, terms.front().word);
  for (const auto& t : terms) {
    if (t.block.rows() != rows || t.block.cols() != cols)
      throw std::invalid_argument("mixed block shapes in operator terms");
    if (word_weight(*alg, t.word) != order)
      throw std::invalid_argument("mixed-weight term list violates strict homogeneity");
  }
  return HomogeneousOperator(std::move(alg), std::move(terms), order, rows, cols);
}

int heisenberg_order(const HomogeneousOperator& op) { return op.order(); }

HomogeneousOperator compose(const HomogeneousOperator& b, const HomogeneousOperator& a) {
  if (b.algebra().get() != a.algebra().get())
    throw std::invalid_argument("compose: operators live on different algebras");
  if (b.cols() != a.rows()) throw std::invalid_argument("compose: block shapes do not chain");
  std::vector<Term> terms;
  terms.reserve(b.terms().size() * a.terms().size());
  for (const auto& tb : b.terms())
    for (const auto& ta : a.terms()) {
      Term t;
      t.coeff = tb.coeff * ta.coeff;
      t.word = tb.word;
      t.word.insert(t.word.end(), ta.word.begin(), ta.word.end());
      t.block = tb.block * ta.block;
      terms.push_back(std::move(t));
    }
  return HomogeneousOperator::create(b.algebra(), std::move(terms));
}

HomogeneousOperator formal_adjoint(const HomogeneousOperator& op) {
  std::vector<Term> terms;
  terms.reserve(op.terms().size());
  for (const auto& t : op.terms()) {
    Term a;
    a.word.assign(t.word.rbegin(), t.word.rend());
    double sign = (t.word.size() % 2 == 0) ? 1.0 : -1.0;
    a.coeff = sign * std::conj(t.coeff);
    a.block = t.block.adjoint();
    terms.push_back(std::move(a));
  }
  return HomogeneousOperator::create(op.algebra(), std::move(terms));
}

HomogeneousOperator add(const HomogeneousOperator& a, const HomogeneousOperator& b) {
  if (a.algebra().get() != b.algebra().get())
    throw std::invalid_argument("add: operators live on different algebras");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("add: block shape mismatch");
  std::vector<Term> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return HomogeneousOperator::create(a.algebra(), std::move(terms));
}

HomogeneousOperator scale(std::complex<double> c, const HomogeneousOperator& op) {
  std::vector<Term> terms = op.terms();
  for (auto& t : terms) t.coeff *= c;
  return HomogeneousOperator::create(op.algebra(), std::move(terms));
}

HomogeneousOperator simplify(const HomogeneousOperator& op) {
  std::map<std::vector<int>, Eigen::MatrixXcd> combined;
  for (const auto& t : op.terms()) {
    auto it = combined.find(t.word);
    if (it == combined.end())
      combined.emplace(t.word, t.coeff * t.block);
    else
      it->second += t.coeff * t.block;
  }
  std::vector<Term> terms;
  for (auto& [word, block] : combined) {
    if (block.norm() == 0.0) continue;
    terms.push_back(Term{{1.0, 0.0}, word, std::move(block)});
  }
  if (terms.empty()) {
    // The zero operator keeps a single zero term so shape/order survive.
    Term z;
    z.coeff = 0.0;
    z.word = op.terms().front().word;
    z.block = Eigen::MatrixXcd::Zero(op.rows(), op.cols());
    terms.push_back(std::move(z));
  }
  return HomogeneousOperator::create(op.algebra(), std::move(terms));
}

bool approx_equal(const HomogeneousOperator& a, const HomogeneousOperator& b, double tol) {
  if (a.algebra().get() != b.algebra().get()) return false;
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  HomogeneousOperator diff = simplify(add(a, scale(-1.0, b)));
  double norm = 0.0;
  for (const auto& t : diff.terms()) norm += std::abs(t.coeff) * t.block.norm();
  double scale_ref = 0.0;
  for (const auto& t : a.terms()) scale_ref += std::abs(t.coeff) * t.block.norm();
  return norm <= tol * std::max(1.0, scale_ref);
}

std::vector<int> ModelSequence::orders() const {
  std::vector<int> out;
  out.reserve(operators.size());
  for (const auto& op : operators) out.push_back(op.order());
  return out;
}

ModelSequence ModelSequence::create(carnot::AlgebraPtr alg,
                                    std::vector<HomogeneousOperator> ops) {
  if (ops.empty()) throw std::invalid_argument("model sequence needs operators");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].algebra().get() != alg.get())
      throw std::invalid_argument("model sequence: algebra mismatch");
    if (ops[i].order() < 1)
      throw std::invalid_argument("model sequence: orders must be >= 1");
    if (i + 1 < ops.size() && ops[i + 1].cols() != ops[i].rows())
      throw std::invalid_argument("model sequence: block shapes do not chain");
  }
  return ModelSequence{std::move(alg), std::move(ops)};
}

namespace {

HomogeneousOperator power(const HomogeneousOperator& op, int s) {
  HomogeneousOperator out = op;
  for (int i = 1; i < s; ++i) out = compose(out, op);
  return out;
}

}  // namespace

HomogeneousOperator rumin_seshadri(const ModelSequence& seq, int i,
                                   const std::vector<int>& s) {
  const int L = static_cast<int>(seq.operators.size());
  if (i < 0 || i > L) throw std::invalid_argument("rumin_seshadri: index out of range");
  if (s.size() != static_cast<std::size_t>(L))
    throw std::invalid_argument("rumin_seshadri: one exponent per operator required");
  for (int v : s)
    if (v < 1) throw std::invalid_argument("rumin_seshadri: exponents must be positive");

  const bool has_left = i > 0;
  const bool has_right = i < L;
  if (has_left && has_right) {
    const int kl = seq.operators[i - 1].order() * s[i - 1];
    const int kr = seq.operators[i].order() * s[i];
    if (kl != kr) {
      throw std::invalid_argument(
          "rumin_seshadri: exponent condition r_{i-1} s_{i-1} = r_i s_i violated: (" +
          std::to_string(seq.operators[i - 1].order()) + ", " + std::to_string(s[i - 1]) +
          ") vs (" + std::to_string(seq.operators[i].order()) + ", " +
          std::to_string(s[i]) + ")");
    }
  }

  if (has_left && has_right) {
    const auto& al = seq.operators[i - 1];
    const auto& ar = seq.operators[i];
    return add(power(compose(al, formal_adjoint(al)), s[i - 1]),
               power(compose(formal_adjoint(ar), ar), s[i]));
  }
  if (has_right) {
    const auto& ar = seq.operators[i];
    return power(compose(formal_adjoint(ar), ar), s[i]);
  }
  const auto& al = seq.operators[i - 1];
  return power(compose(al, formal_adjoint(al)), s[i - 1]);
}

HomogeneousOperator sublaplacian(const carnot::AlgebraPtr& alg) {
  std::vector<Term> terms;
  for (int i = 0; i < alg->dim(); ++i) {
    if (alg->degrees()[i] != -1) continue;
    Term t;
    t.coeff = -1.0;
    t.word = {i, i};
    terms.push_back(std::move(t));
  }
  if (terms.empty())
    throw std::invalid_argument("sublaplacian: algebra has no degree -1 generators");
  return HomogeneousOperator::create(alg, std::move(terms));
}

std::pair<carnot::AlgebraPtr, HomogeneousOperator> heat_extension(
    const HomogeneousOperator& op) {
  const auto& alg = *op.algebra();
  const int dim = alg.dim();
  const int r = op.order();
  std::vector<int> degrees = alg.degrees();
  degrees.push_back(-r);
  const int ndim = dim + 1;
  std::vector<double> c(static_cast<std::size_t>(ndim) * ndim * ndim, 0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        c[(i * ndim + j) * ndim + k] = alg.c(i, j, k);
  auto ext = std::make_shared<carnot::GradedNilpotentLieAlgebra>(
      carnot::GradedNilpotentLieAlgebra::create(std::move(degrees), std::move(c)));

  std::vector<Term> terms;
  for (const auto& t : op.terms()) terms.push_back(t);
  Term ddt;
  ddt.word = {dim};
  ddt.block = Eigen::MatrixXcd::Identity(op.rows(), op.cols());
  terms.push_back(std::move(ddt));
  return {ext, HomogeneousOperator::create(ext, std::move(terms))};
}

HomogeneousOperator from_json(const carnot::AlgebraPtr& alg, const nlohmann::json& doc) {
  if (!doc.contains("terms") || !doc["terms"].is_array())
    throw std::invalid_argument("operator json: missing \"terms\" array");
  std::vector<Term> terms;
  for (const auto& jt : doc["terms"]) {
    Term t;
    if (jt.contains("coeff")) {
      auto c = jt["coeff"];
      t.coeff = {c[0].get<double>(), c[1].get<double>()};
    }
    if (jt.contains("word")) t.word = jt["word"].get<std::vector<int>>();
    if (jt.contains("block")) {
      const auto& rows = jt["block"];
      const int nr = static_cast<int>(rows.size());
      const int nc = nr > 0 ? static_cast<int>(rows[0].size()) : 0;
      t.block = Eigen::MatrixXcd::Zero(nr, nc);
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) {
          const auto& e = rows[i][j];
          if (e.is_array())
            t.block(i, j) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
          else
            t.block(i, j) = e.get<double>();
        }
    }
    terms.push_back(std::move(t));
  }
  return HomogeneousOperator::create(alg, std::move(terms));
}

nlohmann::json to_json(const HomogeneousOperator& op) {
  nlohmann::json jterms = nlohmann::json::array();
  for (const auto& t : op.terms()) {
    nlohmann::json jt;
    jt["coeff"] = {t.coeff.real(), t.coeff.imag()};
    jt["word"] = t.word;
    nlohmann::json block = nlohmann::json::array();
    for (int i = 0; i < t.block.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < t.block.cols(); ++j)
        row.push_back({t.block(i, j).real(), t.block(i, j).imag()});
      block.push_back(row);
    }
    jt["block"] = block;
    jterms.push_back(jt);
  }
  return nlohmann::json{{"terms", jterms}};
}

}  // namespace nilspec::ops
