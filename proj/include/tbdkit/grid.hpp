#pragma once

// Periodic 3D grid carrying 16-component spinor fields. Field storage is
// point-major: value (point, component) lives at index point * 16 + component.

#include <fftw3.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tbdkit {

inline constexpr int spin_dim = 16;

using SpinorField = std::vector<std::complex<double>>;

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
   static std::mutex m;
   return m;
}

struct FftwPlans {
   fftw_plan forward = nullptr;
   fftw_plan backward = nullptr;

   FftwPlans(int n)
   {
      const int dims[3] = {n, n, n};
      const std::size_t total = static_cast<std::size_t>(n) * n * n * spin_dim;
      auto* buf = fftw_alloc_complex(total);
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      std::lock_guard lock(fftw_planner_mutex());
      forward = fftw_plan_many_dft(3, dims, spin_dim, buf, nullptr, spin_dim, 1, buf, nullptr, spin_dim, 1,
                                   FFTW_FORWARD, flags);
      backward = fftw_plan_many_dft(3, dims, spin_dim, buf, nullptr, spin_dim, 1, buf, nullptr, spin_dim, 1,
                                    FFTW_BACKWARD, flags);
      fftw_free(buf);
      if (forward == nullptr || backward == nullptr) throw std::runtime_error("FFTW planning failed");
   }
   FftwPlans(const FftwPlans&) = delete;
   FftwPlans& operator=(const FftwPlans&) = delete;
   ~FftwPlans()
   {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(backward);
   }
};

} // namespace detail

/// n^3 periodic box of side L centred on the origin. With `offset` the nodes
/// sit at cell centres, so r = 0 is never sampled for even n.
class Grid {
public:
   Grid(int n, double length, bool offset = true) : n_(n), length_(length), offset_(offset)
   {
      if (n < 2) throw std::invalid_argument("grid needs n >= 2");
      if (!(length > 0.0)) throw std::invalid_argument("grid needs L > 0");
      plans_ = std::make_shared<detail::FftwPlans>(n);
   }

   int n() const { return n_; }
   double length() const { return length_; }
   bool offset() const { return offset_; }
   double spacing() const { return length_ / n_; }
   double cell_volume() const { return std::pow(spacing(), 3); }
   std::size_t points() const { return static_cast<std::size_t>(n_) * n_ * n_; }
   std::size_t field_size() const { return points() * spin_dim; }

   double coordinate(int i) const { return -0.5 * length_ + (i + (offset_ ? 0.5 : 0.0)) * spacing(); }

   /// Angular wavenumber of DFT index i; the Nyquist index maps to 0.
   double wavenumber(int i) const
   {
      const double dk = 2.0 * std::numbers::pi / length_;
      if (2 * i == n_) return 0.0;
      return dk * (2 * i < n_ ? i : i - n_);
   }

   /// Signed DFT index, with the Nyquist index reported as n/2.
   int signed_index(int i) const { return 2 * i <= n_ ? i : i - n_; }

   std::size_t index(int ix, int iy, int iz) const
   {
      return (static_cast<std::size_t>(ix) * n_ + iy) * n_ + iz;
   }

   Eigen::Vector3d position(std::size_t point) const
   {
      const int iz = static_cast<int>(point % n_);
      const int iy = static_cast<int>((point / n_) % n_);
      const int ix = static_cast<int>(point / (static_cast<std::size_t>(n_) * n_));
      return {coordinate(ix), coordinate(iy), coordinate(iz)};
   }

   Eigen::Vector3d wavevector(std::size_t point) const
   {
      const int iz = static_cast<int>(point % n_);
      const int iy = static_cast<int>((point / n_) % n_);
      const int ix = static_cast<int>(point / (static_cast<std::size_t>(n_) * n_));
      return {wavenumber(ix), wavenumber(iy), wavenumber(iz)};
   }

   /// True when the DFT index of any axis lies in the top third of the band.
   bool in_top_third(std::size_t point) const
   {
      const int iz = static_cast<int>(point % n_);
      const int iy = static_cast<int>((point / n_) % n_);
      const int ix = static_cast<int>(point / (static_cast<std::size_t>(n_) * n_));
      const int cut = n_ / 3;
      return std::abs(signed_index(ix)) > cut || std::abs(signed_index(iy)) > cut ||
             std::abs(signed_index(iz)) > cut;
   }

   bool same_as(const Grid& o) const { return n_ == o.n_ && length_ == o.length_ && offset_ == o.offset_; }

   /// Unnormalised forward DFT of all 16 components, in place.
   void forward(SpinorField& f) const
   {
      check(f);
      fftw_execute_dft(plans_->forward, reinterpret_cast<fftw_complex*>(f.data()),
                       reinterpret_cast<fftw_complex*>(f.data()));
   }

   /// Inverse DFT including the 1/n^3 normalisation, in place.
   void backward(SpinorField& f) const
   {
      check(f);
      fftw_execute_dft(plans_->backward, reinterpret_cast<fftw_complex*>(f.data()),
                       reinterpret_cast<fftw_complex*>(f.data()));
      const double scale = 1.0 / static_cast<double>(points());
      for (auto& v : f) v *= scale;
   }

private:
   void check(const SpinorField& f) const
   {
      if (f.size() != field_size()) throw std::invalid_argument("field size does not match grid");
   }

   int n_;
   double length_;
   bool offset_;
   std::shared_ptr<detail::FftwPlans> plans_;
};

} // namespace tbdkit
