class ModelKind:
    NONE = 0
    CV = 1
    SCV = 2
    PINN = 3

    _VALUES_TO_NAMES = {
        0: "NONE",
        1: "CV",
        2: "SCV",
        3: "PINN",
    }

    _NAMES_TO_VALUES = {
        "NONE": 0,
        "CV": 1,
        "SCV": 2,
        "PINN": 3,
    }


class GroundTruthKind:
    CV = 1
    SCV = 2
    SCV_PLUS_HYSTERESIS = 3

    _VALUES_TO_NAMES = {
        1: "CV",
        2: "SCV",
        3: "SCV_PLUS_HYSTERESIS",
    }

    _NAMES_TO_VALUES = {
        "CV": 1,
        "SCV": 2,
        "SCV_PLUS_HYSTERESIS": 3,
    }


class TrajectoryKind:
    SINE = 1
    RAMP = 2
    STEP = 3

    _VALUES_TO_NAMES = {
        1: "SINE",
        2: "RAMP",
        3: "STEP",
    }

    _NAMES_TO_VALUES = {
        "SINE": 1,
        "RAMP": 2,
        "STEP": 3,
    }


def name_of(kind_cls, value):
    try:
        return kind_cls._VALUES_TO_NAMES[value]
    except KeyError as e:
        raise ValueError(
            "Invalid {} value {}, values should be one of {}".format(
                kind_cls.__name__,
                value,
                list(kind_cls._VALUES_TO_NAMES),
            ),
        ) from e


def value_of(kind_cls, name):
    """Looks up a kind by its name, case-insensitive."""
    key = str(name).strip().upper()
    if key not in kind_cls._NAMES_TO_VALUES:
        raise ValueError(
            "Invalid {} name {}, values should be one of {}".format(
                kind_cls.__name__,
                name,
                list(kind_cls._NAMES_TO_VALUES),
            ),
        )
    return kind_cls._NAMES_TO_VALUES[key]
