#pragma once

#include "wedgedirac/angular_spectrum.hpp"
#include "wedgedirac/commands.hpp"
#include "wedgedirac/core_model.hpp"
#include "wedgedirac/errors.hpp"
#include "wedgedirac/extensions.hpp"
#include "wedgedirac/numerics.hpp"
#include "wedgedirac/singular_functions.hpp"
#include "wedgedirac/straightening.hpp"
