#pragma once

#include <cstddef>
#include <vector>

namespace thinspec {

// Uniformly used container for sampled scalar traces f(t).
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> v;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }
    void push(double time, double value) {
        t.push_back(time);
        v.push_back(value);
    }
    void reserve(std::size_t n) {
        t.reserve(n);
        v.reserve(n);
    }
};

}  // namespace thinspec
