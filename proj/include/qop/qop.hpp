#pragma once

#include "qop/core.hpp"
#include "qop/cost.hpp"
#include "qop/interferometer.hpp"
#include "qop/io.hpp"
#include "qop/optimizer.hpp"
