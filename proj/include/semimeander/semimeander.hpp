#pragma once

#include "band.hpp"
#include "exactalg.hpp"
#include "gram.hpp"
#include "meander.hpp"
#include "spectra.hpp"
