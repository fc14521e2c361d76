// Conversions between user-facing units (km, MPa, hr, cyc/hr) and internal SI.

#ifndef H2PIPE_UNITS_HPP
#define H2PIPE_UNITS_HPP

namespace h2pipe::units {

inline constexpr double seconds_per_hour = 3600.0;
inline constexpr double meters_per_km = 1000.0;
inline constexpr double pascals_per_mpa = 1.0e6;

template <typename Scalar>
constexpr Scalar km_to_m(Scalar km) { return km * Scalar(meters_per_km); }
template <typename Scalar>
constexpr Scalar m_to_km(Scalar m) { return m / Scalar(meters_per_km); }

template <typename Scalar>
constexpr Scalar mpa_to_pa(Scalar mpa) { return mpa * Scalar(pascals_per_mpa); }
template <typename Scalar>
constexpr Scalar pa_to_mpa(Scalar pa) { return pa / Scalar(pascals_per_mpa); }

template <typename Scalar>
constexpr Scalar hr_to_s(Scalar hr) { return hr * Scalar(seconds_per_hour); }
template <typename Scalar>
constexpr Scalar s_to_hr(Scalar s) { return s / Scalar(seconds_per_hour); }

// Frequencies stay in cycles per hour; the forcing converts time to hours.

}  // namespace h2pipe::units

#endif  // H2PIPE_UNITS_HPP
