#include <cmath>
#include <map>

#include "doctest.h"

#include "aec/predictor.hpp"

using namespace aec;

namespace {

PredicateId pid(const std::string& s) { return PredicateId::parse(s); }

// Truth table over a small predicate universe, half true.
std::map<PredicateId, bool> make_truth(int n) {
    std::map<PredicateId, bool> t;
    for (int i = 0; i < n; ++i) t[PredicateId{"p" + std::to_string(i), {}}] = (i % 2 == 0);
    return t;
}

}  // namespace

TEST_CASE("discretize follows the margin rule with inclusive boundary") {
    CHECK(std::get<bool>(discretize({0.9, 0.0}, 0.05)) == true);
    CHECK(is_ambiguous(discretize({0.52, 0.0}, 0.05)));
    CHECK(is_ambiguous(discretize({0.5, 0.0}, 0.01)));
    CHECK(std::get<bool>(discretize({0.75, 0.0}, 0.25)) == true);   // boundary is inclusive
    CHECK(std::get<bool>(discretize({0.25, 0.0}, 0.25)) == false);  // boundary, low side
    CHECK(std::get<bool>(discretize({0.1, 0.0}, 0.3)) == false);
}

TEST_CASE("discretize is total: every (mu, eps) maps to exactly one variant") {
    for (double mu = 0.0; mu <= 1.0; mu += 0.01) {
        for (double eps : {0.0, 0.05, 0.25, 0.5}) {
            auto d = discretize({mu, 0.0}, eps);
            CHECK((is_ambiguous(d) || std::holds_alternative<bool>(d)));
        }
    }
}

TEST_CASE("perfect predictor reports the truth with zero uncertainty") {
    auto truth = make_truth(10);
    SyntheticPredictor pred({1.0, 5, 0.0, 42}, &truth, 1);
    for (const auto& [p, v] : truth) {
        auto out = pred.predict(GroundedStore{}, p);
        CHECK(out.mu == (v ? 1.0 : 0.0));
        CHECK(out.sigma == 0.0);
    }
}

TEST_CASE("single-vote ensemble cannot disagree with itself") {
    auto truth = make_truth(10);
    SyntheticPredictor pred({0.7, 1, 0.0, 42}, &truth, 1);
    for (const auto& [p, v] : truth) CHECK(pred.predict(GroundedStore{}, p).sigma == 0.0);
}

TEST_CASE("chance-level predictor is uncorrelated with the truth") {
    auto truth = make_truth(2);
    SyntheticPredictor pred({0.5, 5, 0.0, 42}, &truth, 1);
    const int n = 10000;
    double sum_mu = 0, sum_t = 0, sum_mt = 0, sum_m2 = 0, sum_t2 = 0, sum_sigma = 0;
    for (int i = 0; i < n; ++i) {
        const auto& [p, v] = *(i % 2 == 0 ? truth.begin() : std::next(truth.begin()));
        auto out = pred.predict(GroundedStore{}, p);
        double t = v ? 1.0 : 0.0;
        sum_mu += out.mu;
        sum_t += t;
        sum_mt += out.mu * t;
        sum_m2 += out.mu * out.mu;
        sum_t2 += t * t;
        sum_sigma += out.sigma;
    }
    double cov = sum_mt / n - (sum_mu / n) * (sum_t / n);
    double var_m = sum_m2 / n - (sum_mu / n) * (sum_mu / n);
    double var_t = sum_t2 / n - (sum_t / n) * (sum_t / n);
    double corr = cov / std::sqrt(var_m * var_t);
    CHECK(std::abs(corr) < 0.05);
    CHECK(sum_sigma / n > 0.5);  // disagreement is high at chance level
}

TEST_CASE("calibration direction: error rate converges to 1 - accuracy") {
    auto truth = make_truth(2);
    const int n = 10000;
    for (double acc : {0.6, 0.8, 0.95}) {
        SyntheticPredictor pred({acc, 1, 0.0, 42}, &truth, 1);
        int errors = 0;
        for (int i = 0; i < n; ++i) {
            const auto& [p, v] = *(i % 2 == 0 ? truth.begin() : std::next(truth.begin()));
            auto d = discretize(pred.predict(GroundedStore{}, p), 0.0);
            if (std::get<bool>(d) != v) ++errors;
        }
        CHECK(std::abs(static_cast<double>(errors) / n - (1.0 - acc)) < 0.02);
    }
}

TEST_CASE("mean sigma is non-increasing in accuracy") {
    auto truth = make_truth(2);
    double prev = 2.0;
    for (double acc : {0.5, 0.6, 0.8, 0.95, 1.0}) {
        SyntheticPredictor pred({acc, 7, 0.0, 42}, &truth, 1);
        double sum = 0;
        const int n = 5000;
        for (int i = 0; i < n; ++i)
            sum += pred.predict(GroundedStore{}, truth.begin()->first).sigma;
        double mean = sum / n;
        CHECK(mean <= prev + 0.01);  // small slack for Monte Carlo noise
        prev = mean;
    }
}

TEST_CASE("recalibrate: empty counterexample set is the identity") {
    SyntheticPredictorConfig cfg{0.8, 5, 0.4, 7};
    auto out = recalibrate(cfg, {});
    CHECK(out.accuracy == cfg.accuracy);
    CHECK(out.ensemble_size == cfg.ensemble_size);
    CHECK(out.noise_scale == cfg.noise_scale);
}

TEST_CASE("recalibrate inflates sigma after confident mistakes") {
    auto truth = make_truth(4);
    SyntheticPredictorConfig cfg{0.8, 7, 0.1, 7};
    // all counterexamples wrong with low reported sigma
    std::vector<PredictorCounterexample> cxs;
    for (const auto& [p, v] : truth) cxs.push_back({p, !v, v, 0.05});
    auto out = recalibrate(cfg, cxs);
    CHECK(out.noise_scale > cfg.noise_scale);

    auto mean_sigma = [&](const SyntheticPredictorConfig& c) {
        SyntheticPredictor pred(c, &truth, 1);
        double sum = 0;
        const int n = 4000;
        for (int i = 0; i < n; ++i)
            sum += pred.predict(GroundedStore{}, truth.begin()->first).sigma;
        return sum / n;
    };
    CHECK(mean_sigma(out) > mean_sigma(cfg));  // sigma inflates on the same inputs
}

TEST_CASE("recalibrate is a fixed point on calibrated input") {
    SyntheticPredictorConfig cfg{0.8, 5, 0.3, 7};
    // error rate 0.25 with mean sigma 0.25: already calibrated
    std::vector<PredictorCounterexample> cxs;
    for (int i = 0; i < 4; ++i)
        cxs.push_back({PredicateId{"p" + std::to_string(i), {}}, i != 0, true, 0.25});
    auto out = recalibrate(cfg, cxs);
    CHECK(std::abs(out.noise_scale - cfg.noise_scale) < 1e-6);
}
