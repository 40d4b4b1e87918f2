#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace floodrisk {

/// Caps the number of worker threads used by data-parallel loops.
/// Zero restores the default (all hardware threads).
void set_thread_count(unsigned count);
unsigned thread_count();

/// Calls fn(i) for every i in [begin, end), split into contiguous chunks,
/// one per worker. Callers only write to slots owned by i, so results never
/// depend on the worker count.
template<typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn)
{
	if (end <= begin)
		return;
	const std::size_t n = end - begin;
	const std::size_t workers = std::min<std::size_t>(thread_count(), n);
	if (workers <= 1) {
		for (std::size_t i = begin; i < end; ++i)
			fn(i);
		return;
	}

	std::vector<std::exception_ptr> errors(workers);
	{
		std::vector<std::jthread> pool;
		pool.reserve(workers);
		for (std::size_t w = 0; w < workers; ++w) {
			const std::size_t lo = begin + n * w / workers;
			const std::size_t hi = begin + n * (w + 1) / workers;
			pool.emplace_back([&, w, lo, hi] {
				try {
					for (std::size_t i = lo; i < hi; ++i)
						fn(i);
				} catch (...) {
					errors[w] = std::current_exception();
				}
			});
		}
	}
	for (auto& e : errors)
		if (e)
			std::rethrow_exception(e);
}

} // namespace floodrisk
