from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="ris-cleanse",
    version="0.1.0",
    description="Rule-driven data cleansing for research information systems",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests", "examples", "examples.*")),
    py_modules=["cli"],
    include_package_data=True,
    install_requires=[
        "pydantic>=2.10.6",
        "python-dotenv>=1.0.0",
        "numpy>=1.24.4",
        "termcolor>=2.4.0",
        "levenshtein>=0.25.0",
    ],
    entry_points={
        "console_scripts": [
            "ris-cleanse=cli:main",
        ],
    },
    python_requires=">=3.10",
)
