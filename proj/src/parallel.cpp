#include "wpk/parallel.hpp"

#include <atomic>

namespace wpk {
namespace {

std::atomic<unsigned> configured{0};

} // namespace

void set_thread_count(unsigned n) { configured = n; }

unsigned thread_count() {
    unsigned n = configured;
    if (n)
        return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

} // namespace wpk
