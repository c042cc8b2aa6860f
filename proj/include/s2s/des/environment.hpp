#pragma once

// Process-based discrete-event core.
//
// Processes are C++20 coroutines returning `Process`. They advance simulated
// time with `co_await env.hold(d)` and contend for capacity-limited pools with
// `co_await resource.acquire()`. Everything is driven by one time-ordered
// calendar; events at equal times run in insertion order.

#include "s2s/sim_time.hpp"

#include <algorithm>
#include <bit>
#include <coroutine>
#include <cstdint>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace s2s::des {

using EventId = std::uint64_t;
using ProcessId = std::uint32_t;

enum class ProcessState { ready, waiting_for_time, waiting_for_resource, finished };

struct ProcessHandle {
    ProcessId id = 0;
    ProcessState state = ProcessState::ready;
};

class Environment;

class Process {
public:
    struct promise_type {
        Environment* env = nullptr;
        ProcessId id = 0;
        std::exception_ptr error;

        Process get_return_object() noexcept {
            return Process(std::coroutine_handle<promise_type>::from_promise(*this));
        }
        std::suspend_always initial_suspend() noexcept { return {}; }
        std::suspend_always final_suspend() noexcept { return {}; }
        void return_void() noexcept {}
        void unhandled_exception() noexcept { error = std::current_exception(); }
    };
    using handle_type = std::coroutine_handle<promise_type>;

    Process(Process&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
    Process& operator=(Process&& other) noexcept {
        if (this != &other) {
            reset();
            handle_ = std::exchange(other.handle_, {});
        }
        return *this;
    }
    Process(const Process&) = delete;
    Process& operator=(const Process&) = delete;
    ~Process() { reset(); }

    handle_type take() noexcept { return std::exchange(handle_, {}); }

private:
    explicit Process(handle_type h) noexcept : handle_(h) {}
    void reset() noexcept {
        if (handle_) {
            handle_.destroy();
            handle_ = {};
        }
    }
    handle_type handle_;
};

struct RunStats {
    SimTime clock;
    std::uint64_t events_executed = 0;
    std::size_t pending_events = 0;
    std::size_t live_processes = 0;
};

class Environment {
public:
    using StepObserver = std::function<void(SimTime, EventId)>;

    Environment() = default;
    Environment(const Environment&) = delete;
    Environment& operator=(const Environment&) = delete;

    ~Environment() {
        for (auto& slot : processes_) {
            if (slot.handle) {
                slot.handle.destroy();
            }
        }
    }

    SimTime now() const noexcept { return now_; }

    /// Queue `action` to run when the clock reaches `time`. Scheduling in the
    /// past throws; equal-time events keep insertion order.
    EventId schedule_at(SimTime time, std::function<void()> action) {
        if (time < now_) {
            throw std::logic_error("schedule_at: time " + std::to_string(time.seconds()) +
                                   " is before the clock " + std::to_string(now_.seconds()));
        }
        const EventId id = next_seq_++;
        calendar_.push_back(Entry{time, id, std::move(action)});
        std::push_heap(calendar_.begin(), calendar_.end(), Later{});
        return id;
    }

    /// Take ownership of a coroutine and make it runnable at the current time.
    ProcessHandle start(Process process) {
        auto h = process.take();
        if (!h) {
            throw std::logic_error("start: empty process");
        }
        const auto id = static_cast<ProcessId>(processes_.size());
        h.promise().env = this;
        h.promise().id = id;
        processes_.push_back(Slot{h, ProcessState::ready});
        ++live_;
        schedule_resume(id, now_, ProcessState::ready);
        return ProcessHandle{id, ProcessState::ready};
    }

    ProcessState state(ProcessId id) const { return processes_.at(id).state; }
    ProcessHandle handle(ProcessId id) const { return ProcessHandle{id, state(id)}; }

    struct HoldAwaiter {
        Environment* env;
        Duration delay;

        bool await_ready() const noexcept { return false; }
        void await_suspend(Process::handle_type h) {
            env->schedule_resume(h.promise().id, env->now_ + delay, ProcessState::waiting_for_time);
        }
        void await_resume() const noexcept {}
    };

    /// Suspend the calling process for `delay`. A zero delay yields to events
    /// already queued at the current instant.
    HoldAwaiter hold(Duration delay) {
        if (!(delay.seconds() >= 0.0)) {
            throw std::invalid_argument("hold: negative duration " + std::to_string(delay.seconds()));
        }
        return HoldAwaiter{this, delay};
    }

    /// Execute every event with time <= horizon. An empty calendar leaves the
    /// clock untouched; otherwise the clock ends at `horizon`.
    RunStats run_until(SimTime horizon) {
        if (horizon < now_) {
            throw std::logic_error("run_until: horizon is before the clock");
        }
        if (!calendar_.empty()) {
            while (!calendar_.empty() && calendar_.front().time <= horizon) {
                std::pop_heap(calendar_.begin(), calendar_.end(), Later{});
                Entry entry = std::move(calendar_.back());
                calendar_.pop_back();
                now_ = entry.time;
                ++executed_;
                trace_hash_ = mix_trace(trace_hash_, entry.time, entry.seq);
                entry.action();
                if (observer_) {
                    observer_(entry.time, entry.seq);
                }
            }
            now_ = horizon;
        }
        return stats();
    }

    RunStats stats() const noexcept { return RunStats{now_, executed_, calendar_.size(), live_}; }

    /// Hash over the (time, sequence) pairs of every executed event.
    std::uint64_t trace_hash() const noexcept { return trace_hash_; }

    void set_step_observer(StepObserver observer) { observer_ = std::move(observer); }

private:
    friend class Resource;

    struct Entry {
        SimTime time;
        EventId seq;
        std::function<void()> action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const noexcept {
            if (a.time != b.time) {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };
    struct Slot {
        Process::handle_type handle;
        ProcessState state;
    };

    static std::uint64_t mix_trace(std::uint64_t h, SimTime t, EventId seq) noexcept {
        constexpr std::uint64_t prime = 0x100000001b3ULL;
        for (std::uint64_t word : {std::bit_cast<std::uint64_t>(t.seconds()), seq}) {
            for (int i = 0; i < 8; ++i) {
                h ^= (word >> (8 * i)) & 0xffU;
                h *= prime;
            }
        }
        return h;
    }

    void schedule_resume(ProcessId id, SimTime at, ProcessState waiting_state) {
        Slot& slot = processes_.at(id);
        if (slot.state == ProcessState::finished) {
            throw std::logic_error("finished process " + std::to_string(id) + " cannot be rescheduled");
        }
        slot.state = waiting_state;
        schedule_at(at, [this, id] { resume(id); });
    }

    void mark(ProcessId id, ProcessState state) { processes_.at(id).state = state; }

    void resume(ProcessId id) {
        Slot& slot = processes_[id];
        slot.state = ProcessState::ready;
        auto h = slot.handle;
        h.resume();
        // `slot` may dangle if the coroutine started new processes.
        if (h.done()) {
            Slot& done = processes_[id];
            auto error = h.promise().error;
            h.destroy();
            done.handle = {};
            done.state = ProcessState::finished;
            --live_;
            if (error) {
                std::rethrow_exception(error);
            }
        }
    }

    SimTime now_;
    EventId next_seq_ = 0;
    std::uint64_t executed_ = 0;
    std::uint64_t trace_hash_ = 0xcbf29ce484222325ULL;
    std::size_t live_ = 0;
    std::vector<Entry> calendar_;
    std::vector<Slot> processes_;
    StepObserver observer_;
};

} // namespace s2s::des
