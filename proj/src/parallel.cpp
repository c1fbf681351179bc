#include "hoferlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hoferlab {

int thread_count()
{
	if (const char* env = std::getenv("HOFERLAB_THREADS"))
	{
		const int n = std::atoi(env);
		if (n > 0)
			return n;
	}
	return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
	const std::size_t workers = std::min<std::size_t>(std::size_t(thread_count()), n);
	if (workers <= 1)
	{
		for (std::size_t i = 0; i < n; ++i)
			body(i);
		return;
	}
	std::exception_ptr error;
	std::mutex mutex;
	std::vector<std::thread> pool;
	const std::size_t chunk = (n + workers - 1) / workers;
	for (std::size_t w = 0; w < workers; ++w)
	{
		const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
		pool.emplace_back([&, lo, hi] {
			try
			{
				for (std::size_t i = lo; i < hi; ++i)
					body(i);
			}
			catch (...)
			{
				std::lock_guard lock(mutex);
				if (!error)
					error = std::current_exception();
			}
		});
	}
	for (auto& t : pool)
		t.join();
	if (error)
		std::rethrow_exception(error);
}

} // namespace hoferlab
