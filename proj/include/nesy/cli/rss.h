#pragma once

#include <atomic>
#include <chrono>
#include <thread>

namespace nesy::cli {

/** Resident set size of this process in MB, read from /proc/self/status (0 when unavailable). */
double currentRssMb();

/**
 * Samples the resident set size on a background thread every `period`
 * until stopped; peakMb() is the largest sample (including one taken at
 * start and one at stop).
 */
class RssSampler {
public:
    explicit RssSampler(std::chrono::milliseconds period = std::chrono::milliseconds(100));
    ~RssSampler();
    RssSampler(const RssSampler&) = delete;
    RssSampler& operator=(const RssSampler&) = delete;

    double stop();
    double peakMb() const {
        return peak_.load();
    }
    std::size_t samples() const {
        return samples_.load();
    }

private:
    void record();

    std::chrono::milliseconds period_;
    std::atomic<double> peak_{0.0};
    std::atomic<std::size_t> samples_{0};
    std::atomic<bool> running_{true};
    std::thread thread_;
};

}  // namespace nesy::cli
