#include "wpk/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace wpk {
namespace {

// fftw_plan creation is not thread safe; execution with the new-array
// interface is. Plans are built once per (length, sign) and never destroyed.
fftw_plan cached_plan(int n, int sign) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find({n, sign});
    if (it != plans.end())
        return it->second;
    std::vector<cplx> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(std::make_pair(n, sign), plan);
    return plan;
}

void execute(std::span<cplx> data, int sign) {
    if (data.empty())
        return;
    auto plan = cached_plan(static_cast<int>(data.size()), sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

} // namespace

void fft_forward(std::span<cplx> data) { execute(data, FFTW_FORWARD); }
void fft_backward(std::span<cplx> data) { execute(data, FFTW_BACKWARD); }

} // namespace wpk
