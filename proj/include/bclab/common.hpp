#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <exception>
#include <stdexcept>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace bclab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = std::vector<int>;

// Exit codes of the CLI map one-to-one onto these.
enum class ErrorCode {
    invalid_argument = 1,
    io = 2,
    format = 3,
    solver = 4,
    pipeline = 5,
    config = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what)
{
    if (!ok) fail(code, what);
}

// Runs fn(0..n-1) on up to `threads` workers with a static interleaved split, so results
// written by index do not depend on the thread count.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn)
{
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace bclab
