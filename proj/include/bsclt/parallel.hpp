#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bsclt {

/// Running count/mean/M2 with Chan's pairwise merge.
struct Moments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) noexcept {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& other) noexcept {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double n_a = static_cast<double>(count);
        const double n_b = static_cast<double>(other.count);
        const double n = n_a + n_b;
        const double delta = other.mean - mean;
        mean += delta * (n_b / n);
        m2 += other.m2 + delta * delta * (n_a * n_b / n);
        count += other.count;
    }

    /// Unbiased sample variance; 0 for fewer than two observations.
    [[nodiscard]] double variance() const noexcept {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Run `body(begin, end)` over [0, count) in chunks of `batch`, on up to `threads` workers
/// (0 = hardware concurrency). Chunks are disjoint; the first exception is rethrown.
template <class Body>
void parallel_for_batches(std::uint64_t count, std::uint64_t batch, unsigned threads, Body&& body) {
    if (count == 0) return;
    batch = std::max<std::uint64_t>(batch, 1);
    const std::uint64_t chunks = (count + batch - 1) / batch;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), chunks));
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) {
            body(c * batch, std::min(count, (c + 1) * batch));
        }
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= chunks) return;
                try {
                    body(c * batch, std::min(count, (c + 1) * batch));
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(chunks);
                    return;
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Reduction block size. Results depend on it, never on batch size or thread count.
inline constexpr std::uint64_t kReductionBlock = 4096;

/// Moments of `sample(i)` for i in [0, count), reduced in fixed blocks and merged in
/// block order so the result is bit-identical for every (batch, threads).
template <class Sample>
Moments deterministic_moments(std::uint64_t count, std::uint64_t batch, unsigned threads,
                              Sample&& sample) {
    const std::uint64_t blocks = (count + kReductionBlock - 1) / kReductionBlock;
    std::vector<Moments> partial(blocks);
    const std::uint64_t blocks_per_batch =
        std::max<std::uint64_t>(1, (batch + kReductionBlock - 1) / kReductionBlock);
    parallel_for_batches(blocks, blocks_per_batch, threads,
                         [&](std::uint64_t first, std::uint64_t last) {
                             for (std::uint64_t b = first; b < last; ++b) {
                                 Moments m;
                                 const std::uint64_t end = std::min(count, (b + 1) * kReductionBlock);
                                 for (std::uint64_t i = b * kReductionBlock; i < end; ++i) {
                                     m.push(sample(i));
                                 }
                                 partial[b] = m;
                             }
                         });
    Moments total;
    for (const Moments& m : partial) total.merge(m);
    return total;
}

}  // namespace bsclt
