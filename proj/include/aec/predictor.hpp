#pragma once

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "aec/rng.hpp"
#include "aec/store.hpp"

namespace aec {

struct Prediction {
    double mu = 0.5;     // belief score in [0,1]
    double sigma = 0.0;  // epistemic uncertainty in [0,1]
};

struct SyntheticPredictorConfig {
    double accuracy = 0.9;     // per-vote correctness, >= 0.5
    int ensemble_size = 5;
    double noise_scale = 0.0;  // logit-space perturbation of per-vote accuracy
    uint64_t seed = 0;
};

struct Ambiguous {};
using Discretized = std::variant<bool, Ambiguous>;

// v-hat = 1[mu >= 0.5] only if |mu - 0.5| >= epsilon, else Ambiguous;
// boundary is inclusive.
Discretized discretize(const Prediction& pred, double epsilon);
bool is_ambiguous(const Discretized& d);

struct PredictorCounterexample {
    PredicateId predicate;
    bool predicted = false;
    bool actual = false;
    double sigma = 0.0;
};

// Nudges noise_scale so mean reported sigma tracks the empirical error rate on
// the counterexample set. Empty input is the identity.
SyntheticPredictorConfig recalibrate(SyntheticPredictorConfig config,
                                     const std::vector<PredictorCounterexample>& counterexamples);

// Synthetic world model M_theta. Simulates an ensemble of noisy observers of
// the hidden truth; the truth handle only biases votes and is never exposed.
// The signature admits no belief data: predictions condition on grounded facts
// alone.
class SyntheticPredictor {
public:
    SyntheticPredictor(SyntheticPredictorConfig config,
                       const std::map<PredicateId, bool>* hidden_truth, uint64_t stream_seed)
        : config_(config), truth_(hidden_truth), rng_(Rng::derive(config.seed, stream_seed)) {}

    Prediction predict(const GroundedStore& grounded, const PredicateId& p);

    const SyntheticPredictorConfig& config() const { return config_; }

private:
    SyntheticPredictorConfig config_;
    const std::map<PredicateId, bool>* truth_;
    Rng rng_;
};

}  // namespace aec
