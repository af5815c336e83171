#include "nesy/cli/rss.h"

#include <fstream>
#include <string>

namespace nesy::cli {

double currentRssMb() {
    std::ifstream in("/proc/self/status");
    std::string key;
    while (in >> key) {
        if (key == "VmRSS:") {
            double kb = 0;
            in >> kb;
            return kb / 1024.0;
        }
        std::getline(in, key);
    }
    return 0.0;
}

RssSampler::RssSampler(std::chrono::milliseconds period) : period_(period) {
    record();
    thread_ = std::thread([this] {
        while (running_.load()) {
            auto until = std::chrono::steady_clock::now() + period_;
            while (running_.load() && std::chrono::steady_clock::now() < until) {
                std::this_thread::sleep_for(std::chrono::milliseconds(5));
            }
            record();
        }
    });
}

RssSampler::~RssSampler() {
    stop();
}

double RssSampler::stop() {
    if (running_.exchange(false)) {
        thread_.join();
        record();
    }
    return peak_.load();
}

void RssSampler::record() {
    double now = currentRssMb();
    double seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    samples_.fetch_add(1);
}

}  // namespace nesy::cli
