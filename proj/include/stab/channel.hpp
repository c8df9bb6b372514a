#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

#include "stab/errors.hpp"

namespace stab {

// Thrown to a sender or receiver when the channel was aborted by a failing
// stage. The originating error is collected separately.
struct ChannelAbortedError : Error {
    ChannelAbortedError() : Error("pipeline channel aborted") {}
};

// Bounded FIFO hand-off between pipeline stages: blocking send on full,
// blocking receive on empty, order-preserving, exactly-once delivery.
template <typename T>
class BoundedChannel {
  public:
    explicit BoundedChannel(std::size_t capacity) : capacity_(capacity) {}

    // Blocks while the channel is full. Throws ChannelAbortedError after
    // abort(); sending after close() is a programming error handled the
    // same way.
    void send(T item) {
        std::unique_lock lock(m_);
        not_full_.wait(lock, [&] { return q_.size() < capacity_ || closed_ || aborted_; });
        if (aborted_ || closed_) {
            throw ChannelAbortedError();
        }
        q_.push_back(std::move(item));
        lock.unlock();
        not_empty_.notify_one();
    }

    // Blocks while empty. Returns nullopt once the channel is closed and
    // drained; throws ChannelAbortedError after abort().
    std::optional<T> recv() {
        std::unique_lock lock(m_);
        not_empty_.wait(lock, [&] { return !q_.empty() || closed_ || aborted_; });
        if (aborted_) {
            throw ChannelAbortedError();
        }
        if (q_.empty()) {
            return std::nullopt;  // closed and drained
        }
        T item = std::move(q_.front());
        q_.pop_front();
        lock.unlock();
        not_full_.notify_one();
        return item;
    }

    // End-of-stream: receivers drain what is queued, then see nullopt.
    void close() {
        {
            std::lock_guard lock(m_);
            closed_ = true;
        }
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    // Error path: drops queued items and wakes every blocked party.
    void abort() {
        {
            std::lock_guard lock(m_);
            aborted_ = true;
            q_.clear();
        }
        not_empty_.notify_all();
        not_full_.notify_all();
    }

  private:
    mutable std::mutex m_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<T> q_;
    std::size_t capacity_;
    bool closed_ = false;
    bool aborted_ = false;
};

}  // namespace stab
