#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <thread>
#include <type_traits>

#include "simstudy/errors.hpp"

namespace simstudy {

using Seconds = std::chrono::duration<double>;

/// Exponential backoff: waits base, 2·base, 4·base, … (each capped at
/// max_backoff) until the action succeeds or the total wait would exceed
/// max_wait.
struct RetryPolicy {
    Seconds base_backoff{0.5};
    Seconds max_backoff{30.0};
    Seconds max_wait{3600.0};

    void validate() const;
};

/// Injectable so tests can observe and skip the waits.
using Sleeper = std::function<void(Seconds)>;

inline void real_sleep(Seconds d) { std::this_thread::sleep_for(d); }

/// Thrown when the store stayed unavailable past max_wait.
class RetryExhaustedError : public ConnectionError {
public:
    RetryExhaustedError(const std::string& what, int attempts) : ConnectionError(what), attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

/// Runs `action`, retrying on ConnectionError. Other exceptions propagate
/// immediately. `on_retry(attempt, wait, error)` is called before each wait.
template <class Action>
auto with_retry(const RetryPolicy& policy, Action&& action, const Sleeper& sleep = real_sleep,
                const std::function<void(int, Seconds, const ConnectionError&)>& on_retry = {})
    -> std::invoke_result_t<Action&> {
    Seconds waited{0};
    Seconds backoff = policy.base_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            return action();
        } catch (const RetryExhaustedError&) {
            throw;
        } catch (const ConnectionError& e) {
            const Seconds wait = std::min(backoff, policy.max_backoff);
            if (waited + wait > policy.max_wait)
                throw RetryExhaustedError("store unavailable after " + std::to_string(attempt) +
                                              " attempts: " + e.what(),
                                          attempt);
            if (on_retry) on_retry(attempt, wait, e);
            sleep(wait);
            waited += wait;
            backoff = std::min(backoff * 2.0, policy.max_backoff);
        }
    }
}

}  // namespace simstudy
