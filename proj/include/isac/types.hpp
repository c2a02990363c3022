#ifndef ISAC_TYPES_HPP
#define ISAC_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace isac {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

using MaskMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

// Complex Q x N x M cube (slot, symbol, subcarrier). Storage keeps each
// subcarrier's Q x N slice contiguous and column-major so it can be viewed
// as an Eigen matrix without copying.
class ComplexCube {
public:
    ComplexCube() = default;
    ComplexCube(int slots, int symbols, int subcarriers)
        : slots_(slots), symbols_(symbols), subcarriers_(subcarriers),
          data_(static_cast<std::size_t>(slots) * symbols * subcarriers, Complex{})
    {
        if (slots < 0 || symbols < 0 || subcarriers < 0)
            throw std::invalid_argument("ComplexCube: negative dimension");
    }

    int slots() const { return slots_; }
    int symbols() const { return symbols_; }
    int subcarriers() const { return subcarriers_; }
    std::size_t size() const { return data_.size(); }

    Complex& operator()(int q, int n, int m) { return data_[index(q, n, m)]; }
    const Complex& operator()(int q, int n, int m) const { return data_[index(q, n, m)]; }

    Eigen::Map<Eigen::MatrixXcd> subcarrier(int m)
    {
        return {data_.data() + static_cast<std::size_t>(m) * slots_ * symbols_, slots_, symbols_};
    }
    Eigen::Map<const Eigen::MatrixXcd> subcarrier(int m) const
    {
        return {data_.data() + static_cast<std::size_t>(m) * slots_ * symbols_, slots_, symbols_};
    }

    std::vector<Complex>& data() { return data_; }
    const std::vector<Complex>& data() const { return data_; }

    bool same_shape(const ComplexCube& other) const
    {
        return slots_ == other.slots_ && symbols_ == other.symbols_ &&
               subcarriers_ == other.subcarriers_;
    }

private:
    std::size_t index(int q, int n, int m) const
    {
        return static_cast<std::size_t>(q) +
               static_cast<std::size_t>(slots_) *
                   (static_cast<std::size_t>(n) + static_cast<std::size_t>(symbols_) * m);
    }

    int slots_ = 0;
    int symbols_ = 0;
    int subcarriers_ = 0;
    std::vector<Complex> data_;
};

} // namespace isac

#endif // ISAC_TYPES_HPP
