#pragma once
// Streaming statistics with blocking error analysis for correlated series.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace h22 {

// Stores the full measurement series (cheap at our scales) so that blocking
// errors and merges stay exact.  Merging concatenates series left-to-right;
// count/mean/variance are order independent up to roundoff.
class Accumulator {
public:
    void add(double x) {
        series_.push_back(x);
        ++n_;
        double d = x - mean_;
        mean_ += d / double(n_);
        m2_ += d * (x - mean_);
        min_ = std::min(min_, x);
        max_ = std::max(max_, x);
    }

    long long count() const { return n_; }
    double mean() const { return mean_; }
    double min() const { return min_; }
    double max() const { return max_; }
    const std::vector<double>& series() const { return series_; }

    // unbiased sample variance
    double variance() const { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }

    // sqrt(var/n), ignoring autocorrelation
    double naive_stderr() const { return n_ > 1 ? std::sqrt(variance() / double(n_)) : 0.0; }

    // blocking transform: repeatedly pair-average; keep the largest error
    // estimate among levels with at least 32 blocks
    double blocking_stderr() const {
        double best = naive_stderr();
        if (n_ < 64) return best;
        std::vector<double> b = series_;
        while (b.size() / 2 >= 32) {
            size_t m = b.size() / 2;
            for (size_t i = 0; i < m; ++i) b[i] = 0.5 * (b[2 * i] + b[2 * i + 1]);
            b.resize(m);
            double mu = 0.0;
            for (double v : b) mu += v;
            mu /= double(m);
            double s2 = 0.0;
            for (double v : b) s2 += (v - mu) * (v - mu);
            s2 /= double(m - 1);
            best = std::max(best, std::sqrt(s2 / double(m)));
        }
        return best;
    }

    // conservative error: max(blocking, naive)
    double stderror() const { return blocking_stderr(); }

    // integrated autocorrelation time in the convention tau = 1/2 for iid
    double tau_int() const {
        double nv = naive_stderr();
        if (nv <= 0.0) return 0.5;
        double r = stderror() / nv;
        return 0.5 * r * r;
    }

    static Accumulator merged(const Accumulator& a, const Accumulator& b) {
        Accumulator out;
        out.n_ = a.n_ + b.n_;
        if (out.n_ == 0) return out;
        double da = double(a.n_) / double(out.n_), db = double(b.n_) / double(out.n_);
        out.mean_ = a.mean_ * da + b.mean_ * db;
        double dd = b.mean_ - a.mean_;
        out.m2_ = a.m2_ + b.m2_ + dd * dd * double(a.n_) * db;
        out.min_ = std::min(a.min_, b.min_);
        out.max_ = std::max(a.max_, b.max_);
        out.series_.reserve(a.series_.size() + b.series_.size());
        out.series_ = a.series_;
        out.series_.insert(out.series_.end(), b.series_.begin(), b.series_.end());
        return out;
    }

    void merge_from(const Accumulator& b) { *this = merged(*this, b); }

private:
    long long n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
    std::vector<double> series_;
};

} // namespace h22
