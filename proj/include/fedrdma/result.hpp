#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace fedrdma {

// Minimal expected-like carrier for fallible operations on the data path.
// Exceptions are reserved for precondition/config violations.
template <typename T, typename E>
class Result {
public:
    static Result ok(T value) { return Result(std::in_place_index<0>, std::move(value)); }
    static Result err(E error) { return Result(std::in_place_index<1>, std::move(error)); }

    bool has_value() const { return v_.index() == 0; }
    explicit operator bool() const { return has_value(); }

    T& value() {
        assert(has_value());
        return std::get<0>(v_);
    }
    const T& value() const {
        assert(has_value());
        return std::get<0>(v_);
    }
    const E& error() const {
        assert(!has_value());
        return std::get<1>(v_);
    }

private:
    template <std::size_t I, typename V>
    Result(std::in_place_index_t<I> tag, V&& v) : v_(tag, std::forward<V>(v)) {}

    std::variant<T, E> v_;
};

}  // namespace fedrdma
