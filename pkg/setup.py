import setuptools

setuptools.setup(
    name='Circumradius_FEM',
    version='0.1',
    packages=['circumradiusfem', 'circumradiusfem.Base', 'circumradiusfem.Geometry', 'circumradiusfem.Quadrature',
              'circumradiusfem.Lagrange', 'circumradiusfem.Constants', 'circumradiusfem.DiffQuot',
              'circumradiusfem.Mesh', 'circumradiusfem.Fem'],
    install_requires=['numpy>=1.26', 'scipy>=1.11'],
    extras_require={'test': ['pytest>=8.0']},
    entry_points={'console_scripts': ['circumradiusfem=circumradiusfem.Cli:main']},
    python_requires='>=3.10',
    license='MIT',
    description='Circumradius interpolation error estimates and P1/P2 FEM on anisotropic triangle meshes'
)
