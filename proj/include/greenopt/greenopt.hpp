#pragma once

#include "greenopt/tolerance.hpp"
#include "greenopt/roots.hpp"
#include "greenopt/quadrature.hpp"
#include "greenopt/kernel1d.hpp"
#include "greenopt/intervals.hpp"
#include "greenopt/forms.hpp"
#include "greenopt/optimize1d.hpp"
#include "greenopt/exchangeflow.hpp"
#include "greenopt/disc2d.hpp"
#include "greenopt/io.hpp"
