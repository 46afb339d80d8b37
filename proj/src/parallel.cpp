#include "extentlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace extentlab
{

std::size_t thread_count()
{
    if (const char *env = std::getenv("EXTENTLAB_THREADS"))
    {
        try
        {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<std::size_t>(v);
        }
        catch (const std::exception &)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body)
{
    const std::size_t workers = std::min(thread_count(), count);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++)
        {
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace extentlab
