#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wbary/errors.hpp"
#include "wbary/rng.hpp"

namespace wbary {

inline constexpr double kWeightSumTolerance = 1e-12;

// Pi = sum_i weight_i * delta_{atom_i}.
template <class M>
class FiniteSupport {
 public:
  FiniteSupport(std::vector<double> weights, std::vector<M> atoms)
      : weights_(std::move(weights)), atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw Error(ErrorCode::InvalidWeights, "population has no atoms");
    if (weights_.size() != atoms_.size())
      throw Error(ErrorCode::InvalidWeights, "weights and atoms differ in length");
    double total = 0.0;
    cumulative_.reserve(weights_.size());
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw Error(ErrorCode::InvalidWeights, "weights must be strictly positive");
      total += w;
      cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance)
      throw Error(ErrorCode::InvalidWeights, "weights must sum to 1");
  }

  static FiniteSupport single(M atom) { return FiniteSupport({1.0}, {std::move(atom)}); }

  static FiniteSupport uniform(std::vector<M> atoms) {
    const std::size_t n = atoms.size();
    std::vector<double> w(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
    // Push the rounding residue into the last weight so the sum is exact enough.
    if (n > 0) {
      double head = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) head += w[i];
      w.back() = 1.0 - head;
    }
    return FiniteSupport(std::move(w), std::move(atoms));
  }

  std::size_t size() const { return atoms_.size(); }
  std::span<const double> weights() const { return weights_; }
  std::span<const M> atoms() const { return atoms_; }
  const M& atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Index i with probability weight_i; consumes exactly one uniform draw.
  std::size_t draw_index(Rng& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::vector<M> atoms_;
};

// Pi given only through a seeded sampler.
template <class M>
class Generative {
 public:
  using Sampler = std::function<M(Rng&)>;

  Generative(std::string name, Sampler sampler) : name_(std::move(name)), sampler_(std::move(sampler)) {
    if (!sampler_) throw Error(ErrorCode::InvalidConfig, "generative population without sampler");
  }

  const std::string& name() const { return name_; }
  M draw(Rng& rng) const { return sampler_(rng); }

 private:
  std::string name_;
  Sampler sampler_;
};

template <class M>
class PopulationModel {
 public:
  PopulationModel(FiniteSupport<M> finite) : model_(std::move(finite)) {}  // NOLINT
  PopulationModel(Generative<M> gen) : model_(std::move(gen)) {}          // NOLINT

  bool is_finite() const { return std::holds_alternative<FiniteSupport<M>>(model_); }

  const FiniteSupport<M>& finite() const {
    if (const auto* f = std::get_if<FiniteSupport<M>>(&model_)) return *f;
    throw Error(ErrorCode::RequiresFiniteSupport, "operation needs a finitely supported population");
  }

  M draw(Rng& rng) const {
    if (const auto* f = std::get_if<FiniteSupport<M>>(&model_)) return f->atom(f->draw_index(rng));
    return std::get<Generative<M>>(model_).draw(rng);
  }

 private:
  std::variant<FiniteSupport<M>, Generative<M>> model_;
};

// S iid draws from Pi.
template <class M>
std::vector<M> sample_batch(const PopulationModel<M>& pop, std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw Error(ErrorCode::EmptyBatch, "batch size must be >= 1");
  std::vector<M> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) out.push_back(pop.draw(rng));
  return out;
}

}  // namespace wbary
