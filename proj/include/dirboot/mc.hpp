#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dirboot/dirac.hpp"
#include "dirboot/words.hpp"

namespace dirboot {

// steps and burn_in count sweeps. A sweep is one proposal per independent
// real parameter block: N(N+1)/2 sites per letter in matrix space, N
// eigenvalues in eigenvalue space.
struct ChainConfig {
  std::size_t N = 8;
  std::size_t steps = 4000;
  std::size_t burn_in = 1000;
  double step = 0.5;  // initial proposal scale, tuned during burn-in
  std::uint64_t seed = 1;
  std::size_t thin = 1;
  std::size_t batches = 20;
};

// Counter-based generator: the k-th draw of stream s under seed is a fixed
// hash of (seed, s, k), so chains are reproducible independently of how
// they are scheduled.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
  std::uint64_t next();
  double uniform();    // [0, 1)
  double symmetric();  // [-1, 1)
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

struct Chain {
  ChainConfig config;
  std::size_t alphabet_size = 1;
  bool eigenvalue_space = false;
  std::vector<CyclicWord> words;
  std::vector<std::vector<double>> series;  // per word: Re Tr(W)/N per measurement
  double acceptance = 0.0;                  // after burn-in
  double final_step = 0.0;
};

struct MomentEstimate {
  CyclicWord word;
  double mean = 0.0;
  double std_error = 0.0;  // batch means
  double variance = 0.0;   // sample variance of the per-measurement values
  std::size_t n_batches = 0;
  std::size_t n_samples = 0;
};

// S evaluated on explicit Hermitian matrices (one per letter). The fermionic
// block adds -(beta2/4) sum_{i != j} log(m^2 + (l_i - l_j)^2) + a (Tr H)^2;
// a configuration with a vanishing log argument returns +inf.
double action_value(const EnsembleSpec& spec, const std::vector<Eigen::MatrixXcd>& matrices);

// Metropolis chain. Bosonic specs move single matrix entries; fermionic
// specs move single eigenvalues with the Vandermonde factor included.
// words defaults to every moment class up to length max(4, action degree).
Chain metropolis_sample(const EnsembleSpec& spec, const ChainConfig& cfg, std::vector<CyclicWord> words = {});

// Independent chains run concurrently; results in input order.
std::vector<Chain> run_chains(const EnsembleSpec& spec, const std::vector<ChainConfig>& cfgs,
                              const std::vector<CyclicWord>& words, std::size_t threads);

// The empty word gives exactly 1 with zero error.
std::vector<MomentEstimate> estimate_moments(const Chain& chain, const std::vector<Word>& words);

// N = 1 reduction: int h^k e^{-S(h)} dh / int e^{-S(h)} dh by adaptive
// Gauss-Kronrod quadrature.
double scalar_oracle(const EnsembleSpec& spec, int k);

}  // namespace dirboot
