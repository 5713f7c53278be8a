#pragma once

#include <cstddef>
#include <sstream>
#include <type_traits>
#include <vector>

#include "doctest.h"

// Readable failure messages for vector comparisons.
template <class T>
struct doctest::StringMaker<std::vector<T>> {
    static doctest::String convert(const std::vector<T>& v) {
        std::ostringstream os;
        os.precision(17);
        os << '{';
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << (i ? ", " : "");
            if constexpr (std::is_arithmetic_v<T>) {
                os << v[i];
            } else {
                os << '?';
            }
        }
        os << '}';
        return os.str().c_str();
    }
};
