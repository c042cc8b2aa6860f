#pragma once

#include "s2s/des/environment.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

namespace s2s::des {

struct WaitRecord {
    ProcessId requester;
    SimTime enqueued;
    SimTime granted;

    Duration wait() const noexcept { return granted - enqueued; }
};

class Resource;

// Proof of holding one unit of a resource; handed back to release().
struct Lease {
    ProcessId holder;
    const Resource* resource;
};

// Capacity-limited pool served strictly first-come first-served.
class Resource {
public:
    Resource(Environment& env, std::string name, int capacity)
        : env_(&env), name_(std::move(name)), capacity_(capacity) {
        if (capacity < 1) {
            throw std::invalid_argument("resource '" + name_ + "' needs capacity >= 1");
        }
        holders_.reserve(static_cast<std::size_t>(capacity));
    }
    Resource(const Resource&) = delete;
    Resource& operator=(const Resource&) = delete;

    struct AcquireAwaiter {
        Resource* resource;
        ProcessId requester = 0;

        bool await_ready() const noexcept { return false; }

        // Returns false (no suspension) on an immediate grant.
        bool await_suspend(Process::handle_type h) {
            requester = h.promise().id;
            return !resource->try_grant_or_enqueue(requester);
        }
        Lease await_resume() const noexcept { return Lease{requester, resource}; }
    };

    AcquireAwaiter acquire() { return AcquireAwaiter{this}; }

    void release(const Lease& lease) {
        if (lease.resource != this) {
            throw std::logic_error("lease for '" + (lease.resource ? lease.resource->name() : std::string("?")) +
                                   "' released on '" + name_ + "'");
        }
        release(lease.holder);
    }

    void release(ProcessId holder) {
        auto it = std::find(holders_.begin(), holders_.end(), holder);
        if (it == holders_.end()) {
            throw std::logic_error("process " + std::to_string(holder) + " does not hold '" + name_ + "'");
        }
        holders_.erase(it);
        if (!queue_.empty()) {
            const Waiter next = queue_.front();
            queue_.pop_front();
            grant(next.id, next.enqueued);
            env_->schedule_resume(next.id, env_->now(), ProcessState::ready);
        }
    }

    const std::string& name() const noexcept { return name_; }
    int capacity() const noexcept { return capacity_; }
    int in_use() const noexcept { return static_cast<int>(holders_.size()); }
    std::size_t queue_length() const noexcept { return queue_.size(); }
    bool holds(ProcessId id) const noexcept {
        return std::find(holders_.begin(), holders_.end(), id) != holders_.end();
    }
    const std::vector<WaitRecord>& wait_log() const noexcept { return wait_log_; }

private:
    struct Waiter {
        ProcessId id;
        SimTime enqueued;
    };

    bool try_grant_or_enqueue(ProcessId id) {
        if (holds(id)) {
            throw std::logic_error("process " + std::to_string(id) + " already holds '" + name_ + "'");
        }
        if (in_use() < capacity_) {
            grant(id, env_->now());
            return true;
        }
        queue_.push_back(Waiter{id, env_->now()});
        env_->mark(id, ProcessState::waiting_for_resource);
        return false;
    }

    void grant(ProcessId id, SimTime enqueued) {
        holders_.push_back(id);
        wait_log_.push_back(WaitRecord{id, enqueued, env_->now()});
    }

    Environment* env_;
    std::string name_;
    int capacity_;
    std::vector<ProcessId> holders_;
    std::deque<Waiter> queue_;
    std::vector<WaitRecord> wait_log_;
};

} // namespace s2s::des
