#include "aec/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace aec {

Discretized discretize(const Prediction& pred, double epsilon) {
    if (epsilon < 0.0 || epsilon > 0.5) throw std::invalid_argument("epsilon out of [0,0.5]");
    if (std::abs(pred.mu - 0.5) >= epsilon) return pred.mu >= 0.5;
    return Ambiguous{};
}

bool is_ambiguous(const Discretized& d) { return std::holds_alternative<Ambiguous>(d); }

Prediction SyntheticPredictor::predict(const GroundedStore& grounded, const PredicateId& p) {
    if (grounded.contains(p))
        throw std::logic_error("predict called on grounded predicate " + p.str());
    auto it = truth_->find(p);
    bool truth = it != truth_->end() && it->second;

    int k = config_.ensemble_size;
    if (k < 1) throw std::invalid_argument("ensemble_size must be >= 1");
    int votes_true = 0;
    for (int i = 0; i < k; ++i) {
        double p_correct;
        if (config_.accuracy >= 1.0 - 1e-12) {
            p_correct = 1.0;
        } else {
            double logit = std::log(config_.accuracy / (1.0 - config_.accuracy));
            logit += config_.noise_scale * rng_.normal();
            p_correct = 1.0 / (1.0 + std::exp(-logit));
        }
        bool correct = rng_.bernoulli(p_correct);
        bool vote = correct ? truth : !truth;
        if (vote) ++votes_true;
    }
    Prediction out;
    out.mu = static_cast<double>(votes_true) / k;
    // vote disagreement, normalized by the maximum binomial variance 1/4
    out.sigma = 4.0 * out.mu * (1.0 - out.mu);
    return out;
}

SyntheticPredictorConfig recalibrate(SyntheticPredictorConfig config,
                                     const std::vector<PredictorCounterexample>& counterexamples) {
    if (counterexamples.empty()) return config;
    double errors = 0.0;
    double sigma_sum = 0.0;
    for (const auto& c : counterexamples) {
        if (c.predicted != c.actual) errors += 1.0;
        sigma_sum += c.sigma;
    }
    double err_rate = errors / counterexamples.size();
    double mean_sigma = sigma_sum / counterexamples.size();
    config.noise_scale = std::max(0.0, config.noise_scale + (err_rate - mean_sigma));
    return config;
}

}  // namespace aec
