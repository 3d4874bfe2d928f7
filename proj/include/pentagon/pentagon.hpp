#pragma once

#include <pentagon/core.hpp>
#include <pentagon/geometry.hpp>
#include <pentagon/symmetry.hpp>
#include <pentagon/fields.hpp>
#include <pentagon/ode.hpp>
#include <pentagon/contour.hpp>
#include <pentagon/phase.hpp>
