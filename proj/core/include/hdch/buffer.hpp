#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace hdch {

namespace detail {
void* aligned_allocate(std::size_t bytes);
void aligned_free(void* p, std::size_t bytes) noexcept;
}  // namespace detail

/// Move-only, SIMD-aligned, uninitialized array. Allocation goes through the
/// FFT library's allocator so buffers can be handed to transforms directly.
template <class T>
class AlignedBuffer {
public:
    AlignedBuffer() = default;
    explicit AlignedBuffer(std::size_t n)
        : data_(n ? static_cast<T*>(detail::aligned_allocate(n * sizeof(T))) : nullptr), size_(n) {}

    AlignedBuffer(const AlignedBuffer&) = delete;
    AlignedBuffer& operator=(const AlignedBuffer&) = delete;
    AlignedBuffer(AlignedBuffer&& o) noexcept : data_(o.data_), size_(o.size_) {
        o.data_ = nullptr;
        o.size_ = 0;
    }
    AlignedBuffer& operator=(AlignedBuffer&& o) noexcept {
        if (this != &o) {
            detail::aligned_free(data_, size_ * sizeof(T));
            data_ = o.data_;
            size_ = o.size_;
            o.data_ = nullptr;
            o.size_ = 0;
        }
        return *this;
    }
    ~AlignedBuffer() { detail::aligned_free(data_, size_ * sizeof(T)); }

    static AlignedBuffer zeros(std::size_t n) {
        AlignedBuffer b(n);
        for (std::size_t i = 0; i < n; ++i) b.data_[i] = T{};
        return b;
    }
    static AlignedBuffer copy_of(std::span<const T> src) {
        AlignedBuffer b(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) b.data_[i] = src[i];
        return b;
    }

    T* data() noexcept { return data_; }
    const T* data() const noexcept { return data_; }
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }
    std::span<T> span() noexcept { return {data_, size_}; }
    std::span<const T> span() const noexcept { return {data_, size_}; }

private:
    T* data_ = nullptr;
    std::size_t size_ = 0;
};

using Complex = std::complex<double>;
using RealBuffer = AlignedBuffer<double>;
using ComplexBuffer = AlignedBuffer<Complex>;

}  // namespace hdch
