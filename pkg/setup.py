import os

import setuptools

NAME = "joint_friction_id"
VERSION = "0.1.0"
description = "Friction identification and compensation for harmonic-drive robot joints"

setup_requires = ["setuptools>=41.0.0"]

install_requires = [
    "numpy>=1.20.0",
    "scipy>=1.6.0",
    "jsonschema>=3.2.0",
    "tqdm>=4.19.2",
    "prettytable>=2.0.0",
    "termcolor>=1.1.0",
]

package_root = os.path.abspath(os.path.dirname(__file__))
readme_filename = os.path.join(package_root, "README.md")
with open(readme_filename, encoding="utf-8") as readme_file:
    readme = readme_file.read()

setuptools.setup(
    name=NAME,
    version=VERSION,
    description=description,
    long_description=readme,
    long_description_content_type="text/markdown",
    packages=[
        package
        for package in setuptools.PEP420PackageFinder.find()
        if package.startswith(NAME)
    ],
    entry_points={
        "console_scripts": ["joint-friction-id=joint_friction_id.cli:main"],
    },
    namespace_packages=(),
    license="MIT Licence",
    platforms="Posix; MacOS X; Windows",
    include_package_data=True,
    install_requires=install_requires,
    setup_requires=setup_requires,
    python_requires=">=3.7",
    scripts=[],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering",
    ],
    zip_safe=False,
)
