#include "sduo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sduo {

FadingGmean::FadingGmean(int num_classes, double alpha) : alpha_(alpha) {
    if (num_classes < 2)
        throw std::invalid_argument("FadingGmean needs >= 2 classes");
    if (alpha <= 0.0 || alpha > 1.0)
        throw std::invalid_argument("fading factor must be in (0, 1]");
    correct_ = Eigen::VectorXd::Zero(num_classes);
    seen_ = Eigen::VectorXd::Zero(num_classes);
}

void FadingGmean::update(int predicted, int actual) {
    if (actual < 1 || actual > seen_.size() || predicted < 1 ||
        predicted > seen_.size())
        throw std::invalid_argument("label out of range in gmean update");
    correct_ *= alpha_;
    seen_ *= alpha_;
    seen_(actual - 1) += 1.0;
    if (predicted == actual)
        correct_(actual - 1) += 1.0;
}

double FadingGmean::value() const {
    double prod = 1.0;
    int included = 0;
    for (int c = 0; c < seen_.size(); ++c) {
        if (seen_(c) > 0.0) {
            const double recall = correct_(c) / seen_(c);
            if (recall == 0.0)
                return 0.0;
            prod *= recall;
            ++included;
        }
    }
    if (included == 0)
        return 0.0;
    return std::pow(prod, 1.0 / included);
}

SlidingPmauc::SlidingPmauc(int num_classes, int window)
    : num_classes_(num_classes), window_(window) {
    if (num_classes < 2)
        throw std::invalid_argument("SlidingPmauc needs >= 2 classes");
    if (window < 1)
        throw std::invalid_argument("window must be >= 1");
    pairs_.resize(static_cast<std::size_t>(num_classes * (num_classes - 1) / 2));
}

SlidingPmauc::PairState& SlidingPmauc::pair_state(int i, int j) {
    // index of (i, j), i < j, in the flattened upper triangle
    const int idx = i * num_classes_ - i * (i + 1) / 2 + (j - i - 1);
    return pairs_[static_cast<std::size_t>(idx)];
}

const SlidingPmauc::PairState& SlidingPmauc::pair_state(int i, int j) const {
    const int idx = i * num_classes_ - i * (i + 1) / 2 + (j - i - 1);
    return pairs_[static_cast<std::size_t>(idx)];
}

namespace {

// concordance contribution of value v joining/leaving `own` side against
// the opposing sorted values: wins + half-ties, counted from pos view
double pos_credit(const std::vector<double>& neg, double v) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), v);
    const auto hi = std::upper_bound(neg.begin(), neg.end(), v);
    const double below = static_cast<double>(lo - neg.begin());
    const double ties = static_cast<double>(hi - lo);
    return below + 0.5 * ties;
}

double neg_credit(const std::vector<double>& pos, double v) {
    const auto lo = std::lower_bound(pos.begin(), pos.end(), v);
    const auto hi = std::upper_bound(pos.begin(), pos.end(), v);
    const double above = static_cast<double>(pos.end() - hi);
    const double ties = static_cast<double>(hi - lo);
    return above + 0.5 * ties;
}

void sorted_insert(std::vector<double>& v, double x) {
    v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}

void sorted_erase(std::vector<double>& v, double x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x)
        throw std::logic_error("pmauc eviction of unknown score");
    v.erase(it);
}

} // namespace

void SlidingPmauc::apply(const Record& rec, bool insert) {
    const int c = rec.actual - 1;
    for (int other = 0; other < num_classes_; ++other) {
        if (other == c)
            continue;
        const int i = std::min(c, other);
        const int j = std::max(c, other);
        PairState& st = pair_state(i, j);
        const double v = rec.scores(i);
        if (c == i) {
            if (insert) {
                st.concordant += pos_credit(st.neg, v);
                sorted_insert(st.pos, v);
            } else {
                sorted_erase(st.pos, v);
                st.concordant -= pos_credit(st.neg, v);
            }
        } else {
            if (insert) {
                st.concordant += neg_credit(st.pos, v);
                sorted_insert(st.neg, v);
            } else {
                sorted_erase(st.neg, v);
                st.concordant -= neg_credit(st.pos, v);
            }
        }
    }
}

void SlidingPmauc::update(const Eigen::VectorXd& scores, int actual) {
    if (scores.size() != num_classes_)
        throw std::invalid_argument("score vector width mismatch");
    if (!scores.allFinite())
        throw std::invalid_argument("non-finite scores in pmauc update");
    if (actual < 1 || actual > num_classes_)
        throw std::invalid_argument("label out of range in pmauc update");
    if (static_cast<int>(buffer_.size()) == window_) {
        apply(buffer_.front(), false);
        buffer_.pop_front();
    }
    buffer_.push_back({scores, actual});
    apply(buffer_.back(), true);
}

double SlidingPmauc::value() const {
    double sum = 0.0;
    int included = 0;
    for (int i = 0; i < num_classes_; ++i) {
        for (int j = i + 1; j < num_classes_; ++j) {
            const PairState& st = pair_state(i, j);
            if (st.pos.empty() || st.neg.empty())
                continue;
            sum += st.concordant / (static_cast<double>(st.pos.size()) *
                                    static_cast<double>(st.neg.size()));
            ++included;
        }
    }
    if (included == 0)
        return 0.5;
    return sum / included;
}

AggregateLog aggregate_runs(const std::vector<RunLog>& logs) {
    if (logs.empty())
        throw std::invalid_argument("aggregate_runs on empty log list");
    const std::size_t n = logs.front().steps.size();
    for (const auto& log : logs)
        if (log.steps.size() != n)
            throw std::invalid_argument("aggregate_runs: length mismatch");

    AggregateLog agg;
    auto fill = [&](auto getter, MetricSeries& series) {
        series.mean.resize(n);
        series.stddev.resize(n);
        const double runs = static_cast<double>(logs.size());
        for (std::size_t t = 0; t < n; ++t) {
            double m = 0.0;
            for (const auto& log : logs)
                m += getter(log.steps[t]);
            m /= runs;
            double var = 0.0;
            for (const auto& log : logs) {
                const double d = getter(log.steps[t]) - m;
                var += d * d;
            }
            series.mean[t] = m;
            series.stddev[t] = std::sqrt(var / runs);
        }
    };
    fill([](const StepRecord& r) { return r.gmean; }, agg.gmean);
    fill([](const StepRecord& r) { return r.pmauc; }, agg.pmauc);
    fill([](const StepRecord& r) { return r.budget_spent; }, agg.budget_spent);
    return agg;
}

} // namespace sduo
