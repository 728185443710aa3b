from setuptools import find_packages, setup
from typing import List

TEST_REQUIREMENTS = ["pytest"]

def get_requirements(file_path: str) -> List[str]:
    '''
    This function reads the requirements from a file and returns them as a list.
    Test-only packages are left to the "test" extra.
    '''
    try:
        with open(file_path, 'r') as file_object:
            requirements = file_object.readlines()
            requirements = [req.strip() for req in requirements
                            if req.strip() and not req.startswith("-e") and not req.startswith("#")]
            return [req for req in requirements if req not in TEST_REQUIREMENTS]
    except FileNotFoundError:
        print(f"File {file_path} not found.")
        return []

setup(
    name="var-metaheuristic-selection",
    version="0.1.0",
    description="VAR estimation, information-criterion model selection and metaheuristic search",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=get_requirements('requirements.txt'),
    extras_require={"test": TEST_REQUIREMENTS},
    entry_points={"console_scripts": ["varselect=src.pipeline.cli:main"]},
    python_requires=">=3.9",
)
