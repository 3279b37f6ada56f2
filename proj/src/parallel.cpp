#include "hjb/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hjb {
namespace {

unsigned initial_threads() {
    if (const char* env = std::getenv("HJB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return 0;
}

std::atomic<unsigned>& configured() {
    static std::atomic<unsigned> value{initial_threads()};
    return value;
}

}  // namespace

void set_thread_count(unsigned n) { configured().store(n); }

unsigned thread_count() {
    const unsigned n = configured().load();
    if (n > 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace hjb
