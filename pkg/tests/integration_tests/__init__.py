# -*- coding: utf-8 -*-
# filename: __init__.py.py
# @Time    : 2025/8/19 11:10
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
